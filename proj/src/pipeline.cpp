#include "protaudit/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <toml.hpp>

#include "protaudit/corpus.hpp"
#include "protaudit/error.hpp"
#include "protaudit/lexicons.hpp"
#include "protaudit/metrics.hpp"
#include "protaudit/probe.hpp"
#include "protaudit/regression.hpp"
#include "protaudit/report.hpp"
#include "protaudit/text.hpp"

namespace protaudit {
namespace fs = std::filesystem;
using nlohmann::json;

// --- config ------------------------------------------------------------------

namespace {

enum class Kind { kString, kInt, kBool, kStringList, kPath, kPathList };

const std::map<std::string, Kind>& KnownKeys() {
  static const std::map<std::string, Kind> keys = {
      {"run.seed", Kind::kInt},
      {"corpus.path", Kind::kPath},
      {"corpus.format", Kind::kString},
      {"corpus.name", Kind::kString},
      {"corpus.abbreviations", Kind::kStringList},
      {"coref.backend", Kind::kString},
      {"coref.command", Kind::kStringList},
      {"coref.id", Kind::kString},
      {"coref.version", Kind::kString},
      {"coref.timeout_seconds", Kind::kInt},
      {"inference.backend", Kind::kString},
      {"inference.fixture", Kind::kPath},
      {"inference.command", Kind::kStringList},
      {"inference.id", Kind::kString},
      {"inference.version", Kind::kString},
      {"inference.timeout_seconds", Kind::kInt},
      {"inference.max_input_chars", Kind::kInt},
      {"inference.beam_size", Kind::kInt},
      {"inference.threads", Kind::kInt},
      {"inference.cache", Kind::kBool},
      {"lexicons.embeddings", Kind::kPath},
      {"lexicons.embeddings_format", Kind::kString},
      {"lexicons.appearance", Kind::kPathList},
      {"lexicons.intellect", Kind::kPathList},
      {"lexicons.power_strong", Kind::kPathList},
      {"lexicons.power_weak", Kind::kPathList},
      {"lexicons.affect", Kind::kPath},
      {"lexicons.categories", Kind::kPath},
      {"scoring.pooling", Kind::kString},
      {"probe.unit", Kind::kString},
  };
  return keys;
}

struct Setting {
  toml::table holder;  // the value under key "v"
  fs::path base;
  const toml::node& node() const { return *holder.get("v"); }
};

std::string Describe(const std::string& key, const char* expected) {
  return "config key " + key + " must be " + expected;
}

std::string AsString(const std::string& key, const Setting& s) {
  if (auto v = s.node().value<std::string>()) return *v;
  throw ValidationError(Describe(key, "a string"));
}

std::int64_t AsInt(const std::string& key, const Setting& s) {
  if (auto v = s.node().value<std::int64_t>()) return *v;
  throw ValidationError(Describe(key, "an integer"));
}

std::vector<std::string> AsStringList(const std::string& key, const Setting& s) {
  std::vector<std::string> out;
  if (auto v = s.node().value<std::string>()) return {*v};
  const auto* arr = s.node().as_array();
  if (!arr) throw ValidationError(Describe(key, "a string or a list of strings"));
  for (const auto& el : *arr) {
    auto v = el.value<std::string>();
    if (!v) throw ValidationError(Describe(key, "a list of strings"));
    out.push_back(*v);
  }
  return out;
}

fs::path Resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  if (path.is_absolute() || base.empty()) return path.lexically_normal();
  return (base / path).lexically_normal();
}

void Apply(Config& c, const std::string& key, const Setting& s) {
  const auto str = [&] { return AsString(key, s); };
  const auto integer = [&](std::int64_t lo) {
    const auto v = AsInt(key, s);
    if (v < lo) throw ValidationError(Describe(key, lo == 0 ? "non-negative" : "positive"));
    return v;
  };
  const auto path = [&] { return Resolve(s.base, str()); };
  const auto paths = [&] {
    std::vector<fs::path> out;
    for (const auto& p : AsStringList(key, s)) out.push_back(Resolve(s.base, p));
    return out;
  };
  if (key == "run.seed") c.seed = static_cast<std::uint64_t>(integer(0));
  else if (key == "corpus.path") c.corpus_path = path();
  else if (key == "corpus.format") c.corpus_format = str();
  else if (key == "corpus.name") c.corpus_name = str();
  else if (key == "corpus.abbreviations") c.abbreviations = AsStringList(key, s);
  else if (key == "coref.backend") c.coref_backend = str();
  else if (key == "coref.command") c.coref_command = AsStringList(key, s);
  else if (key == "coref.id") c.coref_id = str();
  else if (key == "coref.version") c.coref_version = str();
  else if (key == "coref.timeout_seconds") c.coref_timeout_seconds = static_cast<int>(integer(1));
  else if (key == "inference.backend") c.inference_backend = str();
  else if (key == "inference.fixture") c.inference_fixture = path();
  else if (key == "inference.command") c.inference_command = AsStringList(key, s);
  else if (key == "inference.id") c.inference_id = str();
  else if (key == "inference.version") c.inference_version = str();
  else if (key == "inference.timeout_seconds") c.inference_timeout_seconds = static_cast<int>(integer(1));
  else if (key == "inference.max_input_chars") c.max_input_chars = static_cast<std::size_t>(integer(0));
  else if (key == "inference.beam_size") c.beam_size = static_cast<int>(integer(1));
  else if (key == "inference.threads") c.threads = static_cast<std::size_t>(integer(1));
  else if (key == "inference.cache") {
    auto v = s.node().value<bool>();
    if (!v) throw ValidationError(Describe(key, "a boolean"));
    c.cache = *v;
  }
  else if (key == "lexicons.embeddings") c.embeddings = path();
  else if (key == "lexicons.embeddings_format") c.embeddings_format = str();
  else if (key == "lexicons.appearance") c.appearance = paths();
  else if (key == "lexicons.intellect") c.intellect = paths();
  else if (key == "lexicons.power_strong") c.power_strong = paths();
  else if (key == "lexicons.power_weak") c.power_weak = paths();
  else if (key == "lexicons.affect") c.affect = path();
  else if (key == "lexicons.categories") c.categories = path();
  else if (key == "scoring.pooling") c.pooling = str();
  else if (key == "probe.unit") c.probe_unit = str();
}

void CheckChoice(const std::string& key, const std::string& value, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (value == a) return;
  }
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  throw ValidationError("config key " + key + " is \"" + value + "\"; expected one of " + list);
}

Json PathJson(const fs::path& p) { return p.empty() ? Json("") : Json(p.filename().string()); }

Json PathListJson(const std::vector<fs::path>& ps) {
  Json out = Json::array();
  for (const auto& p : ps) out.push_back(PathJson(p));
  return out;
}

}  // namespace

SplitterOptions Config::Splitter() const {
  SplitterOptions o;
  for (const auto& a : abbreviations) o.abbreviations.insert(text::ToLower(a));
  return o;
}

Json Config::Canonical() const {
  Json j;
  j["run"] = Json{{"seed", seed}};
  j["corpus"] = Json{{"path", PathJson(corpus_path)},
                     {"format", corpus_format},
                     {"name", corpus_name.value_or("")},
                     {"abbreviations", abbreviations}};
  j["coref"] = Json{{"backend", coref_backend},
                    {"command", coref_command},
                    {"id", coref_id},
                    {"version", coref_version},
                    {"timeout_seconds", coref_timeout_seconds}};
  j["inference"] = Json{{"backend", inference_backend},
                        {"fixture", PathJson(inference_fixture)},
                        {"command", inference_command},
                        {"id", inference_id},
                        {"version", inference_version},
                        {"timeout_seconds", inference_timeout_seconds},
                        {"max_input_chars", max_input_chars},
                        {"beam_size", beam_size},
                        {"threads", threads},
                        {"cache", cache}};
  j["lexicons"] = Json{{"embeddings", PathJson(embeddings)},
                       {"embeddings_format", embeddings_format},
                       {"appearance", PathListJson(appearance)},
                       {"intellect", PathListJson(intellect)},
                       {"power_strong", PathListJson(power_strong)},
                       {"power_weak", PathListJson(power_weak)},
                       {"affect", PathJson(affect)},
                       {"categories", PathJson(categories)}};
  j["scoring"] = Json{{"pooling", pooling}};
  j["probe"] = Json{{"unit", probe_unit}};
  return j;
}

Config LoadConfig(const std::optional<fs::path>& file, const std::vector<Override>& overrides) {
  std::vector<std::pair<std::string, Setting>> settings;
  if (file) {
    toml::table doc;
    try {
      doc = toml::parse_file(file->string());
    } catch (const toml::parse_error& e) {
      throw ParseError(file->string(), e.source().begin.line, std::string(e.description()));
    }
    const fs::path base = fs::absolute(*file).parent_path();
    for (const auto& [section, node] : doc) {
      const auto* tbl = node.as_table();
      if (!tbl) throw ValidationError("config entry " + std::string(section.str()) + " must be a table");
      for (const auto& [key, value] : *tbl) {
        const std::string full = std::string(section.str()) + "." + std::string(key.str());
        if (!KnownKeys().count(full)) throw ValidationError("unknown config key " + full);
        Setting s;
        s.holder.insert("v", value);
        s.base = base;
        settings.emplace_back(full, std::move(s));
      }
    }
  }
  for (const auto& o : overrides) {
    if (!KnownKeys().count(o.key)) throw ValidationError("unknown config key " + o.key);
    Setting s;
    try {
      auto parsed = toml::parse("v = " + o.value);
      s.holder.insert("v", *parsed.get("v"));
    } catch (const toml::parse_error&) {
      s.holder.insert("v", o.value);
    }
    s.base = fs::current_path();
    settings.emplace_back(o.key, std::move(s));
  }
  Config c;
  for (const auto& [key, s] : settings) Apply(c, key, s);
  CheckChoice("corpus.format", c.corpus_format, {"jsonl", "csv"});
  CheckChoice("coref.backend", c.coref_backend, {"fallback", "command"});
  CheckChoice("inference.backend", c.inference_backend, {"stub", "command"});
  CheckChoice("lexicons.embeddings_format", c.embeddings_format, {"text", "binary"});
  CheckChoice("scoring.pooling", c.pooling, {"story", "token"});
  CheckChoice("probe.unit", c.probe_unit, {"sentence", "story"});
  return c;
}

// --- workspace ---------------------------------------------------------------

namespace {

const std::map<std::string, std::vector<std::string>>& StageDeps() {
  static const std::map<std::string, std::vector<std::string>> deps = {
      {"ingest", {}},
      {"annotate", {"ingest"}},
      {"infer", {"annotate"}},
      {"score", {"infer"}},
      {"regress", {"infer"}},
      {"probe", {"annotate", "infer"}},
      {"report", {"score", "regress", "probe"}},
  };
  return deps;
}

Json FreshManifest() {
  Json m;
  m["schema_version"] = kReportSchemaVersion;
  m["config_digest"] = "";
  m["seed"] = 0;
  m["corpus"] = Json::object();
  m["backends"] = Json::object();
  m["lexicons"] = Json::array();
  Json stages = Json::object();
  for (const char* s : kStages) stages[s] = Json{{"complete", false}, {"artifacts", Json::object()}};
  m["stages"] = stages;
  m["timestamps"] = Json::object();
  return m;
}

std::string UtcNow() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

Workspace::Workspace(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  lock_ = dir_ / ".lock";
  const int fd = ::open(lock_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    lock_.clear();
    throw ValidationError("workspace " + dir_.string() +
                          " is in use by another audit process (remove .lock if that process is gone)");
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
  ::close(fd);
  const fs::path manifest = dir_ / "manifest.json";
  if (fs::exists(manifest)) {
    const json loaded = ReadJsonFile(manifest);
    manifest_ = Json::parse(loaded.dump());
  } else {
    manifest_ = FreshManifest();
  }
}

Workspace::~Workspace() {
  if (!lock_.empty()) {
    std::error_code ec;
    fs::remove(lock_, ec);
  }
}

bool Workspace::StageComplete(const std::string& stage) const {
  const auto& stages = manifest_["stages"];
  return stages.contains(stage) && stages[stage].value("complete", false);
}

void Workspace::Require(const std::string& stage) const {
  const std::string hint = "run `audit " + stage + "` first";
  if (!StageComplete(stage)) throw StageOrderError(hint);
  for (const auto& [name, digest] : manifest_["stages"][stage]["artifacts"].items()) {
    const fs::path p = Path(name);
    if (!fs::exists(p)) throw StageOrderError(name + " is missing; " + hint);
    if (text::FileSha256Hex(p.string()) != digest.get<std::string>()) {
      throw StageOrderError(name + " changed since `audit " + stage + "`; " + hint);
    }
  }
}

void Workspace::Complete(const std::string& stage, const std::vector<std::string>& artifacts) {
  Json digests = Json::object();
  for (const auto& a : artifacts) digests[a] = text::FileSha256Hex(Path(a).string());
  manifest_["stages"][stage] = Json{{"complete", true}, {"artifacts", digests}};
  manifest_["timestamps"][stage] = UtcNow();
  std::set<std::string> dirty = {stage};
  for (const char* s : kStages) {
    const auto& deps = StageDeps().at(s);
    if (std::any_of(deps.begin(), deps.end(), [&](const std::string& d) { return dirty.count(d) > 0; })) {
      dirty.insert(s);
      manifest_["stages"][s] = Json{{"complete", false}, {"artifacts", Json::object()}};
      manifest_["timestamps"].erase(s);
    }
  }
  Save();
}

Json Workspace::ReportManifest() const {
  Json m = manifest_;
  m.erase("timestamps");
  // A report cannot carry its own digest.
  if (m.contains("stages")) m["stages"].erase("report");
  // Sorted keys, so a manifest reloaded from disk embeds the same bytes.
  return Json::parse(json::parse(m.dump()).dump());
}

void Workspace::Save() const { WriteJsonFile(Path("manifest.json"), manifest_); }

// --- backends ----------------------------------------------------------------

std::unique_ptr<CorefBackend> MakeCorefBackend(const Config& config) {
  if (config.coref_backend == "command") {
    if (config.coref_command.empty()) throw ValidationError("coref.command is required for the command backend");
    return std::make_unique<CommandCorefBackend>(config.coref_command, config.coref_id, config.coref_version,
                                                 std::chrono::seconds(config.coref_timeout_seconds));
  }
  return std::make_unique<FallbackCorefBackend>(config.Splitter());
}

std::unique_ptr<InferenceBackend> MakeInferenceBackend(const Config& config) {
  if (config.inference_backend == "command") {
    if (config.inference_command.empty()) {
      throw ValidationError("inference.command is required for the command backend");
    }
    return std::make_unique<CommandInferenceBackend>(config.inference_command, config.inference_id,
                                                     config.inference_version,
                                                     std::chrono::seconds(config.inference_timeout_seconds),
                                                     config.max_input_chars);
  }
  if (config.inference_fixture.empty()) throw ValidationError("inference.fixture is required for the stub backend");
  return StubInferenceBackend::FromFile(config.inference_fixture);
}

// --- stages ------------------------------------------------------------------

namespace {

void Stamp(StageContext& ctx) {
  auto& m = ctx.workspace.manifest();
  m["config_digest"] = text::Sha256Hex(ctx.config.Canonical().dump());
  m["seed"] = ctx.config.seed;
}

Corpus WorkspaceCorpus(StageContext& ctx) {
  LoadOptions options;
  options.splitter = ctx.config.Splitter();
  options.name = ctx.workspace.manifest()["corpus"].value("name", std::string("corpus"));
  return LoadCorpus(ctx.workspace.Path("corpus.jsonl"), CorpusFormat::kJsonl, options);
}

std::vector<ProtagonistAnnotation> WorkspaceAnnotations(StageContext& ctx) {
  std::vector<ProtagonistAnnotation> out;
  for (const auto& j : ReadJsonl(ctx.workspace.Path("annotations.jsonl"))) out.push_back(AnnotationFromJson(j));
  return out;
}

std::vector<AnonymizedStory> WorkspaceAnonymized(StageContext& ctx) {
  std::vector<AnonymizedStory> out;
  const auto options = ctx.config.Splitter();
  for (const auto& j : ReadJsonl(ctx.workspace.Path("anonymized.jsonl"))) out.push_back(AnonymizedFromJson(j, options));
  return out;
}

std::vector<InferenceRecord> WorkspaceRecords(StageContext& ctx) {
  std::vector<InferenceRecord> out;
  for (const auto& j : ReadJsonl(ctx.workspace.Path("inferences.jsonl"))) out.push_back(RecordFromJson(j));
  return out;
}

std::map<std::string, Gender> Genders(const std::vector<ProtagonistAnnotation>& annotations) {
  std::map<std::string, Gender> out;
  for (const auto& a : annotations) out[a.story_id] = a.gender;
  return out;
}

const fs::path& RequirePath(const fs::path& p, const char* key) {
  if (p.empty()) throw ValidationError(std::string("config key ") + key + " is not set");
  return p;
}

const std::vector<fs::path>& RequirePaths(const std::vector<fs::path>& ps, const char* key) {
  if (ps.empty()) throw ValidationError(std::string("config key ") + key + " is not set");
  return ps;
}

void RecordFiles(StageContext& ctx, const std::string& role, const std::vector<fs::path>& files) {
  auto& lex = ctx.workspace.manifest()["lexicons"];
  Json kept = Json::array();
  for (const auto& e : lex) {
    if (e["role"].get<std::string>() != role) kept.push_back(e);
  }
  for (const auto& f : files) {
    kept.push_back(Json{{"role", role}, {"file", f.filename().string()}, {"sha256", text::FileSha256Hex(f.string())}});
  }
  std::vector<Json> sorted(kept.begin(), kept.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const Json& a, const Json& b) {
    return std::make_pair(a["role"].get<std::string>(), a["file"].get<std::string>()) <
           std::make_pair(b["role"].get<std::string>(), b["file"].get<std::string>());
  });
  lex = Json(sorted);
}

Lexicon UnionOf(const std::string& name, const std::vector<fs::path>& files) {
  std::vector<Lexicon> parts;
  for (const auto& f : files) parts.push_back(LoadLexicon(f));
  return UnionLexicons(name, parts);
}

}  // namespace

int RunIngest(StageContext& ctx) {
  Stamp(ctx);
  const auto& path = RequirePath(ctx.config.corpus_path, "corpus.path (or --corpus)");
  LoadOptions options;
  options.splitter = ctx.config.Splitter();
  options.name = ctx.config.corpus_name;
  const auto format = ctx.config.corpus_format == "csv" ? CorpusFormat::kCsvTitleStory : CorpusFormat::kJsonl;
  const Corpus corpus = LoadCorpus(path, format, options);
  SaveCorpus(corpus, ctx.workspace.Path("corpus.jsonl"));
  ctx.workspace.manifest()["corpus"] = Json{{"file", path.filename().string()},
                                            {"format", ctx.config.corpus_format},
                                            {"name", corpus.name},
                                            {"sha256", text::FileSha256Hex(path.string())},
                                            {"stories", corpus.stories.size()}};
  ctx.workspace.Complete("ingest", {"corpus.jsonl"});
  ctx.log << "ingest: " << corpus.stories.size() << " stories from " << path.filename().string() << "\n";
  return 0;
}

int RunAnnotate(StageContext& ctx) {
  ctx.workspace.Require("ingest");
  Stamp(ctx);
  const Corpus corpus = WorkspaceCorpus(ctx);
  auto backend = MakeCorefBackend(ctx.config);
  const auto options = ctx.config.Splitter();
  std::vector<Json> annotations;
  std::vector<Json> anonymized;
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& story : corpus.stories) {
    const AnnotatedStory a = AnnotateStory(story, *backend, options);
    for (const auto& leak : FindLeakedSurfaces(a.anonymized, a.clusters)) {
      ctx.log << "warning: " << story.story_id << ": \"" << leak << "\" survived anonymization\n";
    }
    ++counts[static_cast<int>(a.annotation.gender)];
    annotations.push_back(ToJson(a.annotation));
    anonymized.push_back(ToJson(a.anonymized));
  }
  WriteJsonl(ctx.workspace.Path("annotations.jsonl"), annotations);
  WriteJsonl(ctx.workspace.Path("anonymized.jsonl"), anonymized);
  ctx.workspace.manifest()["backends"]["coref"] = Json{{"id", backend->Id()}, {"version", backend->Version()}};
  ctx.workspace.Complete("annotate", {"annotations.jsonl", "anonymized.jsonl"});
  ctx.log << "annotate: " << counts[0] << " F, " << counts[1] << " M, " << counts[2] << " unresolved\n";
  return 0;
}

int RunInfer(StageContext& ctx) {
  ctx.workspace.Require("annotate");
  Stamp(ctx);
  const auto annotations = WorkspaceAnnotations(ctx);
  const auto anonymized = WorkspaceAnonymized(ctx);
  auto backend = MakeInferenceBackend(ctx.config);
  std::unique_ptr<InferenceCache> cache = ctx.config.cache
                                              ? std::make_unique<InferenceCache>(ctx.workspace.Path("cache.jsonl"))
                                              : std::make_unique<InferenceCache>();
  PassOptions options;
  options.beam_size = ctx.config.beam_size;
  options.threads = ctx.config.threads;
  options.warn = [&](const std::string& w) { ctx.log << "warning: " << w << "\n"; };
  const PassResult pass = RunInferencePass(anonymized, annotations, *backend, *cache, options);

  std::vector<Json> lines;
  for (const auto& r : pass.records) lines.push_back(ToJson(r));
  WriteJsonl(ctx.workspace.Path("inferences.jsonl"), lines);
  Json failures = Json::array();
  for (const auto& f : pass.failures) failures.push_back(Json{{"story_id", f.story_id}, {"message", f.message}});
  WriteJsonFile(ctx.workspace.Path("inference_failures.json"),
                Json{{"failures", failures}, {"skipped_unresolved", pass.skipped_unresolved}});
  ctx.workspace.manifest()["backends"]["inference"] = Json{{"id", backend->Id()}, {"version", backend->Version()}};
  ctx.workspace.Complete("infer", {"inferences.jsonl", "inference_failures.json"});
  ctx.log << "infer: " << pass.records.size() << " records, " << pass.backend_calls << " backend calls, "
          << pass.cache_hits << " cache hits, " << pass.failures.size() << " failed stories\n";
  for (const auto& f : pass.failures) ctx.log << "error: " << f.story_id << ": " << f.message << "\n";
  return pass.failures.empty() ? 0 : 2;
}

int RunScore(StageContext& ctx) {
  ctx.workspace.Require("infer");
  Stamp(ctx);
  const auto& cfg = ctx.config;
  const auto records = WorkspaceRecords(ctx);
  const auto genders = Genders(WorkspaceAnnotations(ctx));

  const auto format = ParseEmbeddingFormat(cfg.embeddings_format);
  EmbeddingLoadStats stats;
  const EmbeddingStore store =
      LoadEmbeddings(RequirePath(cfg.embeddings, "lexicons.embeddings"), *format, &stats);
  ctx.log << "score: " << store.size() << " word vectors";
  if (stats.duplicates || stats.zero_vectors) {
    ctx.log << " (dropped " << stats.duplicates << " duplicates, " << stats.zero_vectors << " zero vectors)";
  }
  ctx.log << "\n";
  const AffectLexicon affect = LoadAffectLexicon(RequirePath(cfg.affect, "lexicons.affect"));
  ScoringResources res;
  res.embeddings = &store;
  res.affect = &affect;
  res.intellect = UnionOf("intellect", RequirePaths(cfg.intellect, "lexicons.intellect"));
  res.appearance = UnionOf("appearance", RequirePaths(cfg.appearance, "lexicons.appearance"));
  res.power_positive = UnionOf("power_strong", RequirePaths(cfg.power_strong, "lexicons.power_strong"));
  res.power_negative = UnionOf("power_weak", RequirePaths(cfg.power_weak, "lexicons.power_weak"));

  const ScoreTable table = ScoreStories(records, genders, res);
  table.WriteCsv(ctx.workspace.Path("scores.csv"));
  const auto summaries =
      cfg.pooling == "token" ? SummarizeTokenScores(records, genders, res) : SummarizeScores(table);
  Json list = Json::array();
  for (const auto& s : summaries) list.push_back(ToJson(s));
  WriteJsonFile(ctx.workspace.Path("score_summary.json"), Json{{"pooling", cfg.pooling}, {"summaries", list}});

  RecordFiles(ctx, "embeddings", {cfg.embeddings});
  RecordFiles(ctx, "affect", {cfg.affect});
  RecordFiles(ctx, "intellect", cfg.intellect);
  RecordFiles(ctx, "appearance", cfg.appearance);
  RecordFiles(ctx, "power_strong", cfg.power_strong);
  RecordFiles(ctx, "power_weak", cfg.power_weak);
  ctx.workspace.Complete("score", {"scores.csv", "score_summary.json"});
  std::size_t missing = 0;
  for (const auto& r : table.rows()) missing += !r.value.has_value();
  ctx.log << "score: " << table.rows().size() << " rows, " << missing << " missing\n";
  return 0;
}

int RunRegress(StageContext& ctx) {
  ctx.workspace.Require("infer");
  Stamp(ctx);
  const auto records = WorkspaceRecords(ctx);
  const auto genders = Genders(WorkspaceAnnotations(ctx));
  const auto& dic = RequirePath(ctx.config.categories, "lexicons.categories");
  const CategoryDictionary dict = LoadCategoryDictionary(dic);
  const auto counts = CountMotivationCategories(records, genders, dict);
  const auto categories = dict.Categories();
  Json doc;
  try {
    doc = ToJson(MotivationRegression(counts, categories));
    doc["note"] = "";
  } catch (const ValidationError& e) {
    std::size_t unresolved = 0;
    for (const auto& [id, g] : genders) unresolved += g == Gender::kUnresolved;
    doc = Json{{"n", 0},
               {"excluded_unresolved", unresolved},
               {"word_count_controlled", false},
               {"categories", Json::array()},
               {"skipped", Json::array()},
               {"note", e.what()}};
  }
  WriteJsonFile(ctx.workspace.Path("regression.json"), doc);
  RecordFiles(ctx, "categories", {dic});
  ctx.workspace.Complete("regress", {"regression.json"});
  ctx.log << "regress: " << doc["categories"].size() << " categories fitted, " << doc["skipped"].size()
          << " skipped\n";
  return 0;
}

int RunProbe(StageContext& ctx) {
  ctx.workspace.Require("annotate");
  ctx.workspace.Require("infer");
  Stamp(ctx);
  const auto genders = Genders(WorkspaceAnnotations(ctx));
  const auto anonymized = WorkspaceAnonymized(ctx);
  const auto records = WorkspaceRecords(ctx);
  const auto unit = ctx.config.probe_unit == "story" ? ProbeUnit::kStory : ProbeUnit::kSentence;

  auto attempt = [&](const std::string& name, const std::function<ProbeResult()>& run) {
    Json j;
    try {
      j = ToJson(run());
      j["note"] = "";
    } catch (const ValidationError& e) {
      j = Json{{"name", name}, {"note", e.what()}};
    } catch (const SplitError& e) {
      j = Json{{"name", name}, {"note", e.what()}};
    }
    return j;
  };
  Json probes = Json::array();
  probes.push_back(attempt("bow_leakage", [&] { return BowLeakageProbe(anonymized, genders, ctx.config.seed, unit); }));
  probes.push_back(
      attempt("inference_gender", [&] { return InferenceGenderClassifier(records, genders, ctx.config.seed); }));
  WriteJsonFile(ctx.workspace.Path("probes.json"), Json{{"probes", probes}});
  ctx.workspace.Complete("probe", {"probes.json"});
  for (const auto& p : probes) {
    ctx.log << "probe: " << p["name"].get<std::string>() << " ";
    if (p.contains("accuracy")) {
      ctx.log << "accuracy " << FormatNumber(p["accuracy"].get<double>()) << "\n";
    } else {
      ctx.log << "skipped (" << p["note"].get<std::string>() << ")\n";
    }
  }
  return 0;
}

int RunReport(StageContext& ctx) {
  for (const char* s : {"score", "regress", "probe"}) ctx.workspace.Require(s);
  ReportInputs in;
  in.manifest = ctx.workspace.ReportManifest();
  const Corpus corpus = WorkspaceCorpus(ctx);
  const auto annotations = WorkspaceAnnotations(ctx);
  in.stats = CorpusStats(corpus, annotations);
  for (const auto& a : annotations) in.no_character_stories += a.protagonist_cluster < 0;

  const json summary = ReadJsonFile(ctx.workspace.Path("score_summary.json"));
  in.pooling = summary.at("pooling").get<std::string>();
  for (const auto& s : summary.at("summaries")) in.summaries.push_back(SummaryFromJson(s));

  const json reg = ReadJsonFile(ctx.workspace.Path("regression.json"));
  in.regression = RegressionFromJson(reg);
  in.regression_note = reg.value("note", std::string());

  const json probes = ReadJsonFile(ctx.workspace.Path("probes.json"));
  for (const auto& p : probes.at("probes")) {
    ProbeEntry e;
    e.name = p.at("name").get<std::string>();
    e.note = p.value("note", std::string());
    if (p.contains("accuracy")) e.result = ProbeFromJson(p);
    in.probes.push_back(std::move(e));
  }
  in.inference_failures = ReadJsonFile(ctx.workspace.Path("inference_failures.json")).at("failures").size();

  Json report = BuildReport(in);
  const fs::path figures_dir = ctx.workspace.Path("figures");
  fs::remove_all(figures_dir);
  const FigureOutput figures = EmitFigures(report, figures_dir);
  report["figures"] = Json{{"files", figures.files}, {"notes", figures.notes}};
  WriteJsonFile(ctx.workspace.Path("report.json"), report);
  WriteFileAtomic(ctx.workspace.Path("report.md"), RenderMarkdown(report));
  ctx.workspace.Complete("report", {"report.json", "report.md"});
  ctx.log << "report: " << ctx.workspace.Path("report.json").string() << "\n";
  return 0;
}

int RunAll(StageContext& ctx) {
  int code = 0;
  for (auto stage : {RunIngest, RunAnnotate, RunInfer, RunScore, RunRegress, RunProbe, RunReport}) {
    code = std::max(code, stage(ctx));
  }
  return code;
}

}  // namespace protaudit
