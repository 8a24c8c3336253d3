#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "protaudit/cli.hpp"
#include "protaudit/error.hpp"
#include "protaudit/lexicons.hpp"
#include "protaudit/metrics.hpp"
#include "protaudit/protagonist.hpp"
#include "protaudit/regression.hpp"
#include "protaudit/serialize.hpp"

namespace py = pybind11;
using namespace protaudit;

namespace {

py::dict AnnotateText(const std::string& story_id, const std::string& text) {
  const Story story = MakeStory(story_id, "", text, Source::kHuman);
  FallbackCorefBackend backend;
  const AnnotatedStory a = AnnotateStory(story, backend);
  py::dict out;
  out["annotation"] = py::str(ToJson(a.annotation).dump());
  std::vector<std::string> sentences;
  for (const auto& s : a.anonymized.sentences) sentences.push_back(s.text);
  out["gender"] = std::string(ToString(a.annotation.gender));
  out["protagonist_cluster"] = a.annotation.protagonist_cluster;
  out["sentences"] = sentences;
  std::vector<std::string> roles;
  for (Role r : a.annotation.sentence_roles) roles.emplace_back(ToString(r));
  out["roles"] = roles;
  return out;
}

py::tuple Run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_protaudit, m) {
  m.doc() = "Protagonist bias audit core";

  py::register_exception<Error>(m, "Error");
  py::register_exception<ValidationError>(m, "ValidationError", m.attr("Error"));
  py::register_exception<UndefinedCosineError>(m, "UndefinedCosineError", m.attr("Error"));
  py::register_exception<ConstantScoreError>(m, "ConstantScoreError", m.attr("Error"));

  m.def("cosine", [](const std::vector<double>& u, const std::vector<double>& v) { return Cosine(u, v); });
  m.def("z_scores", [](const std::vector<double>& v) { return ZScores(v); });
  m.def("lower_median", &LowerMedian);
  m.def("significance_mark", &SignificanceMark);
  m.def("split_sentences", [](const std::string& text) { return SplitSentences(text); });
  m.def("annotate_text", &AnnotateText, py::arg("story_id"), py::arg("text"),
        "Fallback-coref annotation of one story; returns a dict.");
  m.def("run_cli", &Run, py::arg("args"), "Runs the audit CLI; returns (exit_code, stdout, stderr).");
}
