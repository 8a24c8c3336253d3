#include "protaudit/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "protaudit/error.hpp"
#include "protaudit/text.hpp"

namespace protaudit {

using nlohmann::json;

std::vector<json> ReadJsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<json> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (text::Trim(line).empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError(path.string(), number, e.what());
    }
  }
  return out;
}

void WriteFileAtomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void WriteJsonl(const std::filesystem::path& path, const std::vector<Json>& lines) {
  std::string content;
  for (const auto& l : lines) {
    content += l.dump(-1, ' ', false, json::error_handler_t::strict);
    content += '\n';
  }
  WriteFileAtomic(path, content);
}

void WriteJsonFile(const std::filesystem::path& path, const Json& doc) {
  WriteFileAtomic(path, doc.dump(2, ' ', false, json::error_handler_t::strict) + "\n");
}

json ReadJsonFile(const std::filesystem::path& path) {
  try {
    return json::parse(text::ReadFile(path.string()));
  } catch (const json::exception& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

namespace {

template <typename T>
T Field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing key \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("key \"") + key + "\" has the wrong type");
  }
}

}  // namespace

Json ToJson(const ProtagonistAnnotation& a) {
  Json j;
  j["story_id"] = a.story_id;
  j["protagonist_cluster"] = a.protagonist_cluster;
  j["gender"] = ToString(a.gender);
  Json counts = Json::object();
  for (const auto& [p, n] : a.pronoun_counts) counts[p] = n;
  j["pronoun_counts"] = counts;
  Json roles = Json::array();
  for (Role r : a.sentence_roles) roles.push_back(ToString(r));
  j["sentence_roles"] = roles;
  return j;
}

ProtagonistAnnotation AnnotationFromJson(const json& j) {
  ProtagonistAnnotation a;
  a.story_id = Field<std::string>(j, "story_id");
  a.protagonist_cluster = Field<int>(j, "protagonist_cluster");
  const auto g = ParseGender(Field<std::string>(j, "gender"));
  if (!g) throw ValidationError("unknown gender in annotation for " + a.story_id);
  a.gender = *g;
  a.pronoun_counts = Field<std::map<std::string, int>>(j, "pronoun_counts");
  for (const auto& s : Field<std::vector<std::string>>(j, "sentence_roles")) {
    const auto r = ParseRole(s);
    if (!r) throw ValidationError("unknown role \"" + s + "\" in annotation for " + a.story_id);
    a.sentence_roles.push_back(*r);
  }
  return a;
}

Json ToJson(const AnonymizedStory& s) {
  Json j;
  j["story_id"] = s.story_id;
  Json map = Json::object();
  for (const auto& [id, placeholder] : s.placeholder_map) map[std::to_string(id)] = placeholder;
  j["placeholder_map"] = map;
  Json sentences = Json::array();
  for (const auto& sent : s.sentences) sentences.push_back(sent.text);
  j["sentences"] = sentences;
  return j;
}

AnonymizedStory AnonymizedFromJson(const json& j, const SplitterOptions& options) {
  AnonymizedStory s;
  s.story_id = Field<std::string>(j, "story_id");
  for (const auto& [key, value] : Field<std::map<std::string, std::string>>(j, "placeholder_map")) {
    s.placeholder_map[std::stoi(key)] = value;
  }
  std::size_t index = 0;
  for (auto& t : Field<std::vector<std::string>>(j, "sentences")) {
    Sentence sent;
    sent.index = index++;
    sent.tokens = Tokenize(t, options);
    sent.text = std::move(t);
    s.sentences.push_back(std::move(sent));
  }
  return s;
}

Json ToJson(const InferenceRecord& r) {
  Json j;
  j["story_id"] = r.story_id;
  j["sentence_index"] = r.sentence_index;
  j["axis"] = ToString(r.axis);
  j["dimension"] = ToString(r.dimension);
  j["phrases"] = r.phrases;
  j["backend_id"] = r.backend_id;
  j["backend_version"] = r.backend_version;
  return j;
}

InferenceRecord RecordFromJson(const json& j) {
  InferenceRecord r;
  r.story_id = Field<std::string>(j, "story_id");
  r.sentence_index = Field<std::size_t>(j, "sentence_index");
  const auto axis = ParseAxis(Field<std::string>(j, "axis"));
  const auto dim = ParseDimension(Field<std::string>(j, "dimension"));
  if (!axis || !dim) throw ValidationError("unknown axis or dimension in record for " + r.story_id);
  r.axis = *axis;
  r.dimension = *dim;
  r.phrases = Field<std::vector<std::string>>(j, "phrases");
  r.backend_id = Field<std::string>(j, "backend_id");
  r.backend_version = Field<std::string>(j, "backend_version");
  return r;
}

Json NumberJson(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double NumberFromJson(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ValidationError("expected a number");
}

Json ToJson(const RegressionResult& r) {
  Json j;
  j["n"] = r.n;
  j["excluded_unresolved"] = r.excluded;
  j["word_count_controlled"] = r.word_count_controlled;
  Json cats = Json::array();
  for (const auto& c : r.categories) {
    Json e;
    e["category"] = c.category;
    e["coefficient"] = NumberJson(c.coefficient);
    e["std_error"] = NumberJson(c.std_error);
    e["p_value"] = c.p_value;
    e["n"] = c.n;
    e["separated"] = c.separated;
    e["mark"] = c.mark;
    cats.push_back(e);
  }
  j["categories"] = cats;
  Json skipped = Json::array();
  for (const auto& s : r.skipped) skipped.push_back(Json{{"category", s.category}, {"reason", s.reason}});
  j["skipped"] = skipped;
  return j;
}

Json ToJson(const ProbeResult& r) {
  Json j;
  j["name"] = r.name;
  j["classifier"] = r.classifier;
  j["unit"] = r.unit;
  j["accuracy"] = r.accuracy;
  j["seed"] = r.seed;
  j["train_size"] = r.train_size;
  j["test_size"] = r.test_size;
  j["train_stories"] = r.train_stories;
  j["test_stories"] = r.test_stories;
  j["excluded"] = r.excluded;
  return j;
}

RegressionResult RegressionFromJson(const json& j) {
  RegressionResult r;
  r.n = Field<std::size_t>(j, "n");
  r.excluded = Field<std::size_t>(j, "excluded_unresolved");
  r.word_count_controlled = Field<bool>(j, "word_count_controlled");
  for (const auto& e : Field<json>(j, "categories")) {
    CategoryRegression c;
    c.category = Field<std::string>(e, "category");
    c.coefficient = NumberFromJson(e.at("coefficient"));
    c.std_error = NumberFromJson(e.at("std_error"));
    c.p_value = NumberFromJson(e.at("p_value"));
    c.n = Field<std::size_t>(e, "n");
    c.separated = Field<bool>(e, "separated");
    c.mark = Field<std::string>(e, "mark");
    r.categories.push_back(std::move(c));
  }
  for (const auto& e : Field<json>(j, "skipped")) {
    r.skipped.push_back({Field<std::string>(e, "category"), Field<std::string>(e, "reason")});
  }
  return r;
}

ProbeResult ProbeFromJson(const json& j) {
  ProbeResult r;
  r.name = Field<std::string>(j, "name");
  r.classifier = Field<std::string>(j, "classifier");
  r.unit = Field<std::string>(j, "unit");
  r.accuracy = Field<double>(j, "accuracy");
  r.seed = Field<std::uint64_t>(j, "seed");
  r.train_size = Field<std::size_t>(j, "train_size");
  r.test_size = Field<std::size_t>(j, "test_size");
  r.train_stories = Field<std::size_t>(j, "train_stories");
  r.test_stories = Field<std::size_t>(j, "test_stories");
  r.excluded = Field<std::size_t>(j, "excluded");
  return r;
}

Json ToJson(const MetricSummary& s) {
  Json j;
  j["metric"] = s.metric;
  j["axis"] = ToString(s.axis);
  j["female_median"] = s.medians.female ? Json(*s.medians.female) : Json(nullptr);
  j["male_median"] = s.medians.male ? Json(*s.medians.male) : Json(nullptr);
  j["n_female"] = s.medians.n_female;
  j["n_male"] = s.medians.n_male;
  j["missing"] = s.missing;
  j["note"] = s.note;
  return j;
}

MetricSummary SummaryFromJson(const json& j) {
  MetricSummary s;
  s.metric = Field<std::string>(j, "metric");
  const auto axis = ParseAxis(Field<std::string>(j, "axis"));
  if (!axis) throw ValidationError("unknown axis in score summary");
  s.axis = *axis;
  if (!j.at("female_median").is_null()) s.medians.female = j.at("female_median").get<double>();
  if (!j.at("male_median").is_null()) s.medians.male = j.at("male_median").get<double>();
  s.medians.n_female = Field<std::size_t>(j, "n_female");
  s.medians.n_male = Field<std::size_t>(j, "n_male");
  s.missing = Field<std::size_t>(j, "missing");
  s.note = Field<std::string>(j, "note");
  return s;
}

}  // namespace protaudit
