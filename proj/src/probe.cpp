#include "protaudit/probe.hpp"

#include <ceres/ceres.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <utility>

#include "protaudit/error.hpp"
#include "protaudit/text.hpp"

namespace protaudit {
namespace {

using SparseRow = std::vector<std::pair<std::size_t, double>>;

// Uniform integer in [0, bound] by rejection, independent of the standard
// library's distribution implementation.
std::uint64_t Bounded(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) return 0;
  const std::uint64_t range = bound + 1;
  const std::uint64_t limit = range == 0 ? 0 : (~std::uint64_t{0} - range + 1) % range;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= limit) return r % range;
  }
}

std::vector<std::string> Tokens(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : text::SplitWhitespace(text)) out.push_back(text::ToLower(t));
  return out;
}

class PenalizedLogLoss final : public ceres::FirstOrderFunction {
 public:
  PenalizedLogLoss(const std::vector<SparseRow>& rows, const std::vector<int>& labels, std::size_t features,
                   double l2)
      : rows_(rows), labels_(labels), features_(features), l2_(l2) {}

  bool Evaluate(const double* params, double* cost, double* gradient) const override {
    const double bias = params[features_];
    double total = 0.0;
    if (gradient) std::fill(gradient, gradient + features_ + 1, 0.0);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      double z = bias;
      for (auto [j, v] : rows_[i]) z += params[j] * v;
      const double y = labels_[i];
      total += (z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) - y * z;
      if (gradient) {
        const double p = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
        const double r = p - y;
        for (auto [j, v] : rows_[i]) gradient[j] += r * v;
        gradient[features_] += r;
      }
    }
    for (std::size_t j = 0; j < features_; ++j) {
      total += 0.5 * l2_ * params[j] * params[j];
      if (gradient) gradient[j] += l2_ * params[j];
    }
    *cost = total;
    return true;
  }

  int NumParameters() const override { return static_cast<int>(features_ + 1); }

 private:
  const std::vector<SparseRow>& rows_;
  const std::vector<int>& labels_;
  std::size_t features_;
  double l2_;
};

std::map<std::string, Gender> GenderedOnly(const std::map<std::string, Gender>& genders,
                                           const std::set<std::string>& available, std::size_t& excluded) {
  std::map<std::string, Gender> out;
  for (const auto& id : available) {
    auto it = genders.find(id);
    if (it == genders.end() || it->second == Gender::kUnresolved) {
      ++excluded;
      continue;
    }
    out.emplace(id, it->second);
  }
  return out;
}

double Evaluate(TextClassifier& classifier, const std::vector<std::string>& train_texts,
                const std::vector<int>& train_labels, const std::vector<std::string>& test_texts,
                const std::vector<int>& test_labels) {
  classifier.Fit(train_texts, train_labels);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test_texts.size(); ++i) {
    if (classifier.Predict(test_texts[i]) == test_labels[i]) ++correct;
  }
  return test_texts.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test_texts.size());
}

}  // namespace

StorySplit StratifiedSplit(const std::map<std::string, Gender>& genders, std::uint64_t seed, double test_fraction) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ValidationError("test fraction must lie in (0, 1)");
  std::map<Gender, std::vector<std::string>> groups;
  for (const auto& [id, g] : genders) {
    if (g != Gender::kUnresolved) groups[g].push_back(id);
  }
  StorySplit split;
  std::mt19937_64 rng(seed);
  for (Gender g : {Gender::kFemale, Gender::kMale}) {
    auto& ids = groups[g];
    if (ids.size() < 2) {
      throw SplitError("gender " + std::string(ToString(g)) + " has " + std::to_string(ids.size()) +
                       " stories; both splits need at least one");
    }
    for (std::size_t i = ids.size() - 1; i > 0; --i) std::swap(ids[i], ids[Bounded(rng, i)]);
    auto held = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(ids.size())));
    held = std::clamp<std::size_t>(held, 1, ids.size() - 1);
    split.test.insert(split.test.end(), ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(held));
    split.train.insert(split.train.end(), ids.begin() + static_cast<std::ptrdiff_t>(held), ids.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

void BagOfWordsLogisticClassifier::Fit(std::span<const std::string> texts, std::span<const int> labels) {
  if (texts.size() != labels.size()) throw ValidationError("texts and labels differ in length");
  bool has[2] = {false, false};
  for (int y : labels) {
    if (y != 0 && y != 1) throw ValidationError("labels must be 0 or 1");
    has[y] = true;
  }
  if (!has[0] || !has[1]) throw SplitError("training data holds a single class");

  vocabulary_.clear();
  std::vector<std::vector<std::string>> tokenized;
  for (const auto& t : texts) tokenized.push_back(Tokens(t));
  std::set<std::string> words;
  for (const auto& doc : tokenized) words.insert(doc.begin(), doc.end());
  for (const auto& w : words) vocabulary_.emplace(w, vocabulary_.size());

  std::vector<SparseRow> rows;
  for (const auto& doc : tokenized) {
    std::map<std::size_t, double> counts;
    for (const auto& w : doc) counts[vocabulary_.find(w)->second] += 1.0;
    rows.emplace_back(counts.begin(), counts.end());
  }
  std::vector<int> y(labels.begin(), labels.end());

  std::vector<double> params(vocabulary_.size() + 1, 0.0);
  ceres::GradientProblem problem(new PenalizedLogLoss(rows, y, vocabulary_.size(), l2_));
  ceres::GradientProblemSolver::Options options;
  options.line_search_direction_type = ceres::LBFGS;
  options.max_num_iterations = 1000;
  options.function_tolerance = 1e-12;
  options.gradient_tolerance = 1e-10;
  options.parameter_tolerance = 1e-12;
  options.logging_type = ceres::SILENT;
  options.minimizer_progress_to_stdout = false;
  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(options, problem, params.data(), &summary);
  if (summary.termination_type == ceres::FAILURE) {
    throw Error("classifier optimization failed: " + summary.message);
  }
  bias_ = params.back();
  params.pop_back();
  weights_ = std::move(params);
}

double BagOfWordsLogisticClassifier::Margin(std::string_view text) const {
  double z = bias_;
  for (const auto& w : Tokens(text)) {
    auto it = vocabulary_.find(w);
    if (it != vocabulary_.end()) z += weights_[it->second];
  }
  return z;
}

int BagOfWordsLogisticClassifier::Predict(std::string_view text) const { return Margin(text) > 0.0 ? 1 : 0; }

ProbeResult BowLeakageProbe(std::span<const AnonymizedStory> stories, const std::map<std::string, Gender>& genders,
                            std::uint64_t seed, ProbeUnit unit, TextClassifier* classifier) {
  ProbeResult result;
  result.name = "bow_leakage";
  result.seed = seed;
  result.unit = unit == ProbeUnit::kSentence ? "sentence" : "story";

  std::map<std::string, const AnonymizedStory*> by_id;
  std::set<std::string> ids;
  for (const auto& s : stories) {
    if (!by_id.emplace(s.story_id, &s).second) throw DuplicateIdError("duplicate story id " + s.story_id);
    ids.insert(s.story_id);
  }
  const auto labelled = GenderedOnly(genders, ids, result.excluded);
  std::size_t female = 0;
  for (const auto& [id, g] : labelled) female += g == Gender::kFemale;
  const std::size_t male = labelled.size() - female;
  if (female < 20 || male < 20) {
    throw ValidationError("leakage probe needs at least 20 stories per gender (have " + std::to_string(female) +
                          " F, " + std::to_string(male) + " M)");
  }

  const StorySplit split = StratifiedSplit(labelled, seed);
  auto collect = [&](const std::vector<std::string>& part, std::vector<std::string>& texts, std::vector<int>& y) {
    for (const auto& id : part) {
      const int label = labelled.at(id) == Gender::kFemale ? 1 : 0;
      const auto& story = *by_id.at(id);
      if (unit == ProbeUnit::kSentence) {
        for (const auto& s : story.sentences) {
          texts.push_back(s.text);
          y.push_back(label);
        }
      } else {
        std::string joined;
        for (const auto& s : story.sentences) {
          if (!joined.empty()) joined += ' ';
          joined += s.text;
        }
        texts.push_back(std::move(joined));
        y.push_back(label);
      }
    }
  };
  std::vector<std::string> train_texts, test_texts;
  std::vector<int> train_y, test_y;
  collect(split.train, train_texts, train_y);
  collect(split.test, test_texts, test_y);

  BagOfWordsLogisticClassifier fallback;
  TextClassifier& model = classifier ? *classifier : fallback;
  result.classifier = model.Id();
  result.accuracy = Evaluate(model, train_texts, train_y, test_texts, test_y);
  result.train_size = train_texts.size();
  result.test_size = test_texts.size();
  result.train_stories = split.train.size();
  result.test_stories = split.test.size();
  return result;
}

ConcatenatedInferences ConcatenateInferences(std::span<const InferenceRecord> records,
                                             const std::map<std::string, Gender>& genders) {
  std::map<std::string, std::vector<const InferenceRecord*>> by_story;
  for (const auto& r : records) {
    if (std::find(kClassifierAxes.begin(), kClassifierAxes.end(), r.axis) == kClassifierAxes.end()) continue;
    by_story[r.story_id].push_back(&r);
  }
  ConcatenatedInferences out;
  const std::string sep = " " + std::string(kSeparator) + " ";
  for (const auto& [id, gender] : genders) {
    if (gender == Gender::kUnresolved) continue;
    auto it = by_story.find(id);
    std::set<SocialAxis> axes;
    if (it != by_story.end()) {
      for (const auto* r : it->second) axes.insert(r->axis);
    }
    if (axes.size() != kClassifierAxes.size()) {
      ++out.excluded;
      continue;
    }
    std::string joined;
    bool first = true;
    for (const auto* r : it->second) {
      for (const auto& phrase : r->phrases) {
        if (!first) joined += sep;
        joined += phrase;
        first = false;
      }
    }
    out.texts.emplace(id, std::move(joined));
  }
  return out;
}

ProbeResult InferenceGenderClassifier(std::span<const InferenceRecord> records,
                                      const std::map<std::string, Gender>& genders, std::uint64_t seed,
                                      TextClassifier* classifier) {
  ProbeResult result;
  result.name = "inference_gender";
  result.seed = seed;
  result.unit = "story";
  const ConcatenatedInferences joined = ConcatenateInferences(records, genders);
  result.excluded = joined.excluded;
  for (const auto& [id, g] : genders) result.excluded += g == Gender::kUnresolved;

  std::map<std::string, Gender> labelled;
  for (const auto& [id, text] : joined.texts) labelled.emplace(id, genders.at(id));
  const StorySplit split = StratifiedSplit(labelled, seed);

  std::vector<std::string> train_texts, test_texts;
  std::vector<int> train_y, test_y;
  for (const auto& id : split.train) {
    train_texts.push_back(joined.texts.at(id));
    train_y.push_back(labelled.at(id) == Gender::kFemale ? 1 : 0);
  }
  for (const auto& id : split.test) {
    test_texts.push_back(joined.texts.at(id));
    test_y.push_back(labelled.at(id) == Gender::kFemale ? 1 : 0);
  }
  BagOfWordsLogisticClassifier fallback;
  TextClassifier& model = classifier ? *classifier : fallback;
  result.classifier = model.Id();
  result.accuracy = Evaluate(model, train_texts, train_y, test_texts, test_y);
  result.train_size = result.train_stories = split.train.size();
  result.test_size = result.test_stories = split.test.size();
  return result;
}

}  // namespace protaudit
