#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "protaudit/annotation.hpp"
#include "protaudit/corpus.hpp"
#include "protaudit/inference.hpp"
#include "protaudit/metrics.hpp"
#include "protaudit/probe.hpp"
#include "protaudit/protagonist.hpp"
#include "protaudit/regression.hpp"

namespace protaudit {

using Json = nlohmann::ordered_json;

// Lines of a JSONL file; blank lines are skipped. Throws ParseError with the
// 1-based line number.
std::vector<nlohmann::json> ReadJsonl(const std::filesystem::path& path);
void WriteJsonl(const std::filesystem::path& path, const std::vector<Json>& lines);

// Pretty-printed with a trailing newline, written through a temp file.
void WriteJsonFile(const std::filesystem::path& path, const Json& doc);
nlohmann::json ReadJsonFile(const std::filesystem::path& path);

// Writes `content` to a sibling temp file, then renames it into place.
void WriteFileAtomic(const std::filesystem::path& path, const std::string& content);

// Keys: story_id, protagonist_cluster, gender, pronoun_counts, sentence_roles.
Json ToJson(const ProtagonistAnnotation& a);
ProtagonistAnnotation AnnotationFromJson(const nlohmann::json& j);

// Keys: story_id, placeholder_map, sentences. Tokens are rebuilt on read.
Json ToJson(const AnonymizedStory& s);
AnonymizedStory AnonymizedFromJson(const nlohmann::json& j, const SplitterOptions& options = {});

// Keys: story_id, sentence_index, axis, dimension, phrases, backend_id,
// backend_version.
Json ToJson(const InferenceRecord& r);
InferenceRecord RecordFromJson(const nlohmann::json& j);

// Non-finite numbers are written as the strings "inf", "-inf" and "nan".
Json NumberJson(double v);
double NumberFromJson(const nlohmann::json& j);

Json ToJson(const RegressionResult& r);
RegressionResult RegressionFromJson(const nlohmann::json& j);

Json ToJson(const ProbeResult& r);
ProbeResult ProbeFromJson(const nlohmann::json& j);

// Keys: metric, axis, female_median, male_median, n_female, n_male, missing,
// note. Missing medians are null.
Json ToJson(const MetricSummary& s);
MetricSummary SummaryFromJson(const nlohmann::json& j);

}  // namespace protaudit
