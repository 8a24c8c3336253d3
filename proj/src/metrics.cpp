#include "protaudit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "protaudit/csv.hpp"
#include "protaudit/error.hpp"
#include "protaudit/text.hpp"

namespace protaudit {
namespace {

double Norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> MeanVector(const Lexicon& lexicon, const EmbeddingStore& store, bool unit) {
  std::vector<double> mean(store.dimension(), 0.0);
  std::size_t n = 0;
  for (const auto& w : lexicon.words) {
    auto v = store.Lookup(w);
    if (!v) continue;
    const double scale = unit ? 1.0 / Norm(*v) : 1.0;
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += (*v)[i] * scale;
    ++n;
  }
  if (n == 0) {
    throw LexiconUnusableError("no word of lexicon '" + lexicon.name + "' is in the embedding store");
  }
  for (double& x : mean) x /= static_cast<double>(n);
  return mean;
}

std::string FormatDouble(double v) {
  std::ostringstream ss;
  ss << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return ss.str();
}

}  // namespace

LexiconScorer::LexiconScorer(const Lexicon& lexicon, const EmbeddingStore& store)
    : store_(&store), name_(lexicon.name), mean_unit_(MeanVector(lexicon, store, true)) {
  for (const auto& w : lexicon.words) {
    if (store.Contains(w)) ++effective_size_;
  }
}

std::optional<double> LexiconScorer::Score(std::string_view word) const {
  auto v = store_->Lookup(word);
  if (!v) return std::nullopt;
  const double norm = Norm(*v);
  double dot = 0.0;
  for (std::size_t i = 0; i < mean_unit_.size(); ++i) dot += (*v)[i] * mean_unit_[i];
  return dot / norm;
}

std::optional<double> AssociationScore(std::string_view word, const Lexicon& lexicon,
                                       const EmbeddingStore& store) {
  return LexiconScorer(lexicon, store).Score(word);
}

SemanticAxis BuildSemanticAxis(const Lexicon& positive, const Lexicon& negative, const EmbeddingStore& store,
                               std::string name) {
  const auto a = MeanVector(positive, store, false);
  const auto b = MeanVector(negative, store, false);
  SemanticAxis axis{std::move(name), std::vector<double>(a.size()), {positive.name, negative.name}};
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    axis.vector[i] = a[i] - b[i];
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
  }
  if (Norm(axis.vector) <= 1e-12 * scale || Norm(axis.vector) == 0.0) {
    throw DegenerateAxisError("semantic axis '" + axis.name + "' from '" + positive.name + "' and '" +
                              negative.name + "' is a zero vector");
  }
  return axis;
}

std::optional<double> AxisScore(std::string_view word, const SemanticAxis& axis, const EmbeddingStore& store) {
  auto v = store.Lookup(word);
  if (!v) return std::nullopt;
  return Cosine(*v, axis.vector);
}

std::optional<double> StoryAxisAggregate(std::span<const std::string> tokens, const TokenScorer& scorer) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& t : tokens) {
    if (auto s = scorer(t)) {
      sum += *s;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::vector<double> ZScores(std::span<const double> values) {
  if (values.size() < 2) throw ValidationError("z-scores need at least two values");
  double mean = 0.0;
  double scale = 0.0;
  for (double v : values) {
    mean += v;
    scale = std::max(scale, std::abs(v));
  }
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  const double sd = std::sqrt(var);
  if (sd == 0.0 || sd <= 1e-12 * scale) throw ConstantScoreError("scores have zero spread");
  std::vector<double> z;
  z.reserve(values.size());
  for (double v : values) z.push_back((v - mean) / sd);
  return z;
}

double LowerMedian(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median of an empty sample");
  const std::size_t k = (values.size() - 1) / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
  return values[k];
}

GroupMedians ZScoreGroupMedians(std::span<const GenderValue> values) {
  std::vector<double> raw;
  raw.reserve(values.size());
  for (const auto& gv : values) {
    if (gv.gender == Gender::kUnresolved) throw ValidationError("unresolved gender in group medians");
    raw.push_back(gv.value);
  }
  const auto z = ZScores(raw);
  std::vector<double> f;
  std::vector<double> m;
  for (std::size_t i = 0; i < values.size(); ++i) {
    (values[i].gender == Gender::kFemale ? f : m).push_back(z[i]);
  }
  GroupMedians out;
  out.n_female = f.size();
  out.n_male = m.size();
  if (!f.empty()) out.female = LowerMedian(std::move(f));
  if (!m.empty()) out.male = LowerMedian(std::move(m));
  return out;
}

std::optional<AffectScore> AffectAggregate(std::span<const std::string> tokens, const AffectLexicon& affect) {
  AffectScore sum;
  std::size_t n = 0;
  for (const auto& t : tokens) {
    if (auto s = affect.Lookup(t)) {
      sum.valence += s->valence;
      sum.arousal += s->arousal;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return AffectScore{sum.valence / static_cast<double>(n), sum.arousal / static_cast<double>(n)};
}

// --- score tables ------------------------------------------------------------

void ScoreTable::Add(ScoreRow row) {
  if (row.gender == Gender::kUnresolved) {
    throw ValidationError("score row for story '" + row.story_id + "' has an unresolved gender");
  }
  auto key = std::make_tuple(row.story_id, row.axis, row.metric);
  if (!keys_.emplace(key, rows_.size()).second) {
    throw ValidationError("duplicate score row for story '" + row.story_id + "', metric " + row.metric);
  }
  rows_.push_back(std::move(row));
}

void ScoreTable::WriteCsv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "story_id,gender,axis,metric,value\n";
  for (const auto& r : rows_) {
    out << csv::JoinRow({r.story_id, std::string(ToString(r.gender)), std::string(ToString(r.axis)), r.metric,
                         r.value ? FormatDouble(*r.value) : std::string()})
        << '\n';
  }
}

ScoreTable ScoreTable::ReadCsv(const std::filesystem::path& path) {
  const std::string file = path.string();
  const auto records = csv::Parse(text::ReadFile(file), file);
  if (records.empty() || records[0].fields != std::vector<std::string>{"story_id", "gender", "axis", "metric", "value"}) {
    throw ParseError(file, 1, "expected header story_id,gender,axis,metric,value");
  }
  ScoreTable table;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i].fields;
    if (f.size() != 5) throw ParseError(file, records[i].line, "expected 5 fields");
    auto gender = ParseGender(f[1]);
    auto axis = ParseAxis(f[2]);
    if (!gender || !axis) throw ParseError(file, records[i].line, "bad gender or axis");
    ScoreRow row{f[0], *gender, *axis, f[3], std::nullopt};
    if (!f[4].empty()) {
      try {
        std::size_t used = 0;
        row.value = std::stod(f[4], &used);
        if (used != f[4].size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw ParseError(file, records[i].line, "bad value '" + f[4] + "'");
      }
    }
    try {
      table.Add(std::move(row));
    } catch (const ValidationError& e) {
      throw ParseError(file, records[i].line, e.what());
    }
  }
  return table;
}

std::map<std::pair<std::string, SocialAxis>, std::vector<std::string>> CollectAxisTokens(
    std::span<const InferenceRecord> records) {
  std::map<std::pair<std::string, SocialAxis>, std::vector<std::string>> out;
  for (const auto& r : records) {
    auto tokens = NormalizePhrases(r.phrases);
    auto& slot = out[{r.story_id, r.axis}];
    slot.insert(slot.end(), std::make_move_iterator(tokens.begin()), std::make_move_iterator(tokens.end()));
  }
  return out;
}

namespace {

struct Scorers {
  LexiconScorer intellect;
  LexiconScorer appearance;
  SemanticAxis power;
  const EmbeddingStore* store;
  const AffectLexicon* affect;

  explicit Scorers(const ScoringResources& r)
      : intellect(r.intellect, *r.embeddings),
        appearance(r.appearance, *r.embeddings),
        power(BuildSemanticAxis(r.power_positive, r.power_negative, *r.embeddings)),
        store(r.embeddings),
        affect(r.affect) {}

  TokenScorer Portrayal(std::string_view metric) const {
    if (metric == "intellect") return [this](std::string_view w) { return intellect.Score(w); };
    if (metric == "appearance") return [this](std::string_view w) { return appearance.Score(w); };
    return [this](std::string_view w) { return AxisScore(w, power, *store); };
  }

  TokenScorer Affect(std::string_view metric) const {
    const bool valence = metric == "valence";
    return [this, valence](std::string_view w) -> std::optional<double> {
      auto s = affect->Lookup(w);
      if (!s) return std::nullopt;
      return valence ? s->valence : s->arousal;
    };
  }
};

void CheckResources(const ScoringResources& r) {
  if (r.embeddings == nullptr || r.affect == nullptr) {
    throw ValidationError("scoring needs embeddings and an affect lexicon");
  }
}

// Canonical (metric, axis) order of the report.
std::vector<std::pair<std::string, SocialAxis>> MetricOrder() {
  std::vector<std::pair<std::string, SocialAxis>> out;
  for (auto m : kPortrayalMetrics) out.emplace_back(std::string(m), SocialAxis::kPrAtt);
  for (auto axis : kMentalStateAxes) {
    for (auto m : kAffectMetrics) out.emplace_back(std::string(m), axis);
  }
  return out;
}

MetricSummary Summarize(const std::string& metric, SocialAxis axis, const std::vector<GenderValue>& values,
                        std::size_t missing) {
  MetricSummary s{metric, axis, {}, missing, {}};
  for (const auto& v : values) (v.gender == Gender::kFemale ? s.medians.n_female : s.medians.n_male)++;
  if (values.size() < 2) {
    s.note = "fewer than two scores";
    return s;
  }
  try {
    s.medians = ZScoreGroupMedians(values);
  } catch (const ConstantScoreError&) {
    s.note = "constant scores";
  }
  return s;
}

}  // namespace

ScoreTable ScoreStories(std::span<const InferenceRecord> records, const std::map<std::string, Gender>& genders,
                        const ScoringResources& resources) {
  CheckResources(resources);
  const Scorers scorers(resources);
  const auto tokens = CollectAxisTokens(records);
  static const std::vector<std::string> kEmpty;
  auto tokens_of = [&](const std::string& id, SocialAxis axis) -> const std::vector<std::string>& {
    auto it = tokens.find({id, axis});
    return it == tokens.end() ? kEmpty : it->second;
  };

  ScoreTable table;
  for (const auto& [id, gender] : genders) {
    if (gender == Gender::kUnresolved) continue;
    for (auto metric : kPortrayalMetrics) {
      table.Add({id, gender, SocialAxis::kPrAtt, std::string(metric),
                 StoryAxisAggregate(tokens_of(id, SocialAxis::kPrAtt), scorers.Portrayal(metric))});
    }
    for (auto axis : kMentalStateAxes) {
      const auto affect = AffectAggregate(tokens_of(id, axis), *resources.affect);
      table.Add({id, gender, axis, "valence", affect ? std::optional(affect->valence) : std::nullopt});
      table.Add({id, gender, axis, "arousal", affect ? std::optional(affect->arousal) : std::nullopt});
    }
  }
  return table;
}

std::vector<MetricSummary> SummarizeScores(const ScoreTable& table) {
  std::map<std::pair<std::string, SocialAxis>, std::pair<std::vector<GenderValue>, std::size_t>> groups;
  for (const auto& r : table.rows()) {
    auto& g = groups[{r.metric, r.axis}];
    if (r.value) {
      g.first.push_back({r.gender, *r.value});
    } else {
      ++g.second;
    }
  }
  std::vector<MetricSummary> out;
  for (const auto& key : MetricOrder()) {
    auto it = groups.find(key);
    if (it == groups.end()) continue;
    out.push_back(Summarize(key.first, key.second, it->second.first, it->second.second));
    groups.erase(it);
  }
  for (const auto& [key, g] : groups) out.push_back(Summarize(key.first, key.second, g.first, g.second));
  return out;
}

std::vector<MetricSummary> SummarizeTokenScores(std::span<const InferenceRecord> records,
                                                const std::map<std::string, Gender>& genders,
                                                const ScoringResources& resources) {
  CheckResources(resources);
  const Scorers scorers(resources);
  const auto tokens = CollectAxisTokens(records);
  std::vector<MetricSummary> out;
  for (const auto& [metric, axis] : MetricOrder()) {
    const TokenScorer scorer =
        axis == SocialAxis::kPrAtt ? scorers.Portrayal(metric) : scorers.Affect(metric);
    std::vector<GenderValue> values;
    std::size_t missing = 0;
    for (const auto& [id, gender] : genders) {
      if (gender == Gender::kUnresolved) continue;
      auto it = tokens.find({id, axis});
      if (it == tokens.end()) continue;
      for (const auto& t : it->second) {
        if (auto s = scorer(t)) {
          values.push_back({gender, *s});
        } else {
          ++missing;
        }
      }
    }
    out.push_back(Summarize(metric, axis, values, missing));
  }
  return out;
}

}  // namespace protaudit
