#include "protaudit/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>

#include "protaudit/error.hpp"
#include "protaudit/pipeline.hpp"
#include "protaudit/report.hpp"
#include "protaudit/text.hpp"

namespace protaudit {
namespace fs = std::filesystem;

namespace {

Override ParseOverride(const std::string& raw) {
  const auto eq = raw.find('=');
  if (eq == std::string::npos || eq == 0) throw ValidationError("--set expects section.key=value, got " + raw);
  return {std::string(text::Trim(raw.substr(0, eq))), std::string(text::Trim(raw.substr(eq + 1)))};
}

std::string Absolute(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Audit a story corpus for implicit gender bias around its protagonists.", "audit"};
  app.require_subcommand(1);

  std::string config_file;
  std::string corpus;
  std::string backend;
  std::optional<std::uint64_t> seed;
  std::string workspace;
  std::string format = "json";
  std::vector<std::string> sets;

  app.add_option("--config", config_file, "TOML configuration file");
  app.add_option("--corpus", corpus, "corpus file (overrides corpus.path)");
  app.add_option("--backend", backend, "inference backend: stub or command (overrides inference.backend)");
  app.add_option("--seed", seed, "random seed (overrides run.seed)");
  app.add_option("--out", workspace, "workspace directory (default: $AUDIT_WORKSPACE)");
  app.add_option("--format", format, "report output printed by `report`: json or md")
      ->check(CLI::IsMember({"json", "md"}));
  app.add_option("--set", sets, "override any config key, e.g. --set inference.beam_size=3");

  struct Command {
    const char* name;
    const char* help;
    int (*run)(StageContext&);
  };
  const Command commands[] = {
      {"ingest", "load and validate the corpus", RunIngest},
      {"annotate", "find protagonists, resolve gender, anonymize", RunAnnotate},
      {"infer", "collect commonsense inferences per social axis", RunInfer},
      {"score", "lexicon and embedding scores with group medians", RunScore},
      {"regress", "motivation-category regression", RunRegress},
      {"probe", "gender leakage probes", RunProbe},
      {"report", "write report.json, report.md and figures", RunReport},
      {"run-all", "every stage in order", RunAll},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help)->fallthrough();

  std::vector<std::string> argv_tail(args.rbegin(), args.rend());
  try {
    app.parse(argv_tail);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "audit: " << e.what() << "\n" << "run `audit --help` for usage\n";
    return 1;
  }

  const Command* chosen = nullptr;
  for (const auto& c : commands) {
    if (app.got_subcommand(c.name)) chosen = &c;
  }

  try {
    std::vector<Override> overrides;
    if (!corpus.empty()) overrides.push_back({"corpus.path", "\"" + Absolute(corpus) + "\""});
    if (!backend.empty()) overrides.push_back({"inference.backend", backend});
    if (seed) overrides.push_back({"run.seed", std::to_string(*seed)});
    for (const auto& s : sets) overrides.push_back(ParseOverride(s));
    const Config config =
        LoadConfig(config_file.empty() ? std::nullopt : std::optional<fs::path>(config_file), overrides);

    if (workspace.empty()) {
      if (const char* env = std::getenv("AUDIT_WORKSPACE")) workspace = env;
    }
    if (workspace.empty()) throw ValidationError("no workspace: pass --out or set AUDIT_WORKSPACE");

    Workspace ws(workspace);
    StageContext ctx{config, ws, err};
    const int code = chosen->run(ctx);
    if (std::string(chosen->name) == "report") {
      if (format == "md") {
        out << text::ReadFile(ws.Path("report.md").string());
      } else {
        out << text::ReadFile(ws.Path("report.json").string());
      }
    }
    return code;
  } catch (const BackendError& e) {
    err << "audit: backend error";
    if (!e.story_id().empty()) err << " (story " << e.story_id() << ")";
    err << ": " << e.what() << (e.retriable() ? "; retry may succeed" : "") << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "audit: error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace protaudit
