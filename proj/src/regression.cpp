#include "protaudit/regression.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "protaudit/error.hpp"

namespace protaudit {
namespace {

// log(1 + exp(x)) without overflow.
double Softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double LogLikelihood(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y[i] * eta[i] - Softplus(eta[i]);
  return ll;
}

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments MomentsOf(const std::vector<double>& v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.sd += (x - m.mean) * (x - m.mean);
  m.sd = std::sqrt(m.sd / static_cast<double>(v.size()));
  return m;
}

}  // namespace

double TwoSidedNormalP(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

double ChiSquare1P(double statistic) {
  if (statistic <= 0.0) return 1.0;
  return std::erfc(std::sqrt(statistic / 2.0));
}

LogisticFit FitLogistic(std::span<const std::vector<double>> design, std::span<const double> response,
                        int max_iterations, double tolerance) {
  const auto n = static_cast<Eigen::Index>(design.size());
  if (n == 0 || static_cast<std::size_t>(n) != response.size()) {
    throw ValidationError("logistic fit needs matching, non-empty design and response");
  }
  const auto p = static_cast<Eigen::Index>(design[0].size());
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(design[i].size()) != p) throw ValidationError("ragged design matrix");
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = design[i][j];
    y[i] = response[i];
  }

  LogisticFit fit;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd eta = x * beta;
  double ll = LogLikelihood(eta, y);
  Eigen::MatrixXd info(p, p);

  auto information = [&](const Eigen::VectorXd& e) {
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mu = Sigmoid(e[i]);
      w[i] = std::max(mu * (1.0 - mu), 1e-300);
    }
    return Eigen::MatrixXd(x.transpose() * w.asDiagonal() * x);
  };

  for (fit.iterations = 0; fit.iterations < max_iterations; ++fit.iterations) {
    Eigen::VectorXd mu(n);
    for (Eigen::Index i = 0; i < n; ++i) mu[i] = Sigmoid(eta[i]);
    info = information(eta);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(info);
    qr.setThreshold(1e-12);
    if (qr.rank() < p) {
      fit.singular = true;
      break;
    }
    const Eigen::VectorXd step = qr.solve(x.transpose() * (y - mu));
    double scale = 1.0;
    Eigen::VectorXd candidate = beta + step;
    Eigen::VectorXd candidate_eta = x * candidate;
    double candidate_ll = LogLikelihood(candidate_eta, y);
    for (int halving = 0; halving < 30 && candidate_ll < ll - 1e-12 * std::abs(ll); ++halving) {
      scale /= 2.0;
      candidate = beta + scale * step;
      candidate_eta = x * candidate;
      candidate_ll = LogLikelihood(candidate_eta, y);
    }
    const double change = std::abs(candidate_ll - ll);
    beta = candidate;
    eta = candidate_eta;
    ll = candidate_ll;
    if (change < tolerance * (std::abs(ll) + 0.1)) {
      fit.converged = true;
      ++fit.iterations;
      break;
    }
  }

  fit.log_likelihood = ll;
  fit.coefficients.assign(beta.data(), beta.data() + p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mu = Sigmoid(eta[i]);
    if (mu < 1e-10 || mu > 1.0 - 1e-10) fit.separated = true;
  }
  fit.std_errors.assign(static_cast<std::size_t>(p), std::numeric_limits<double>::infinity());
  if (!fit.singular) {
    info = information(eta);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(info);
    if (lu.isInvertible()) {
      const Eigen::MatrixXd cov = lu.inverse();
      for (Eigen::Index j = 0; j < p; ++j) fit.std_errors[static_cast<std::size_t>(j)] = std::sqrt(cov(j, j));
    } else {
      fit.singular = true;
    }
  }
  return fit;
}

std::string SignificanceMark(double p_value) {
  if (p_value < 0.001) return "*";
  if (p_value < 0.01) return "†";
  if (p_value < 0.05) return "‡";
  return "";
}

RegressionResult MotivationRegression(std::span<const StoryCategoryCounts> stories,
                                      std::span<const std::string> categories) {
  RegressionResult result;
  std::vector<const StoryCategoryCounts*> used;
  std::size_t females = 0;
  std::size_t males = 0;
  for (const auto& s : stories) {
    if (s.gender == Gender::kUnresolved) {
      ++result.excluded;
      continue;
    }
    (s.gender == Gender::kFemale ? females : males)++;
    used.push_back(&s);
  }
  if (females < 2 || males < 2) {
    throw ValidationError("regression needs at least two stories per gender (have " + std::to_string(females) +
                          " F, " + std::to_string(males) + " M)");
  }
  result.n = used.size();

  std::vector<double> y;
  std::vector<double> totals;
  for (const auto* s : used) {
    y.push_back(s->gender == Gender::kFemale ? 1.0 : 0.0);
    totals.push_back(s->total_tokens);
  }
  const Moments total_m = MomentsOf(totals);
  result.word_count_controlled = total_m.sd > 0.0;

  for (const auto& category : categories) {
    std::vector<double> counts;
    for (const auto* s : used) {
      auto it = s->counts.find(category);
      counts.push_back(it == s->counts.end() ? 0.0 : it->second);
    }
    const Moments cm = MomentsOf(counts);
    if (cm.sd == 0.0) {
      result.skipped.push_back({category, "zero variance"});
      continue;
    }
    std::vector<std::vector<double>> full;
    std::vector<std::vector<double>> reduced;
    for (std::size_t i = 0; i < used.size(); ++i) {
      std::vector<double> row = {1.0, (counts[i] - cm.mean) / cm.sd};
      std::vector<double> base = {1.0};
      if (result.word_count_controlled) {
        const double t = (totals[i] - total_m.mean) / total_m.sd;
        row.push_back(t);
        base.push_back(t);
      }
      full.push_back(std::move(row));
      reduced.push_back(std::move(base));
    }
    const LogisticFit fit = FitLogistic(full, y);
    if (fit.singular && !fit.separated) {
      result.skipped.push_back({category, "collinear with the word-count covariate"});
      continue;
    }
    CategoryRegression r;
    r.category = category;
    r.n = used.size();
    if (fit.separated) {
      const LogisticFit base = FitLogistic(reduced, y);
      r.separated = true;
      r.coefficient = std::copysign(std::numeric_limits<double>::infinity(), fit.coefficients[1]);
      r.std_error = std::numeric_limits<double>::infinity();
      r.p_value = ChiSquare1P(2.0 * (fit.log_likelihood - base.log_likelihood));
    } else {
      r.coefficient = fit.coefficients[1] / cm.sd;
      r.std_error = fit.std_errors[1] / cm.sd;
      r.p_value = TwoSidedNormalP(fit.coefficients[1] / fit.std_errors[1]);
    }
    r.p_value = std::clamp(r.p_value, 0.0, 1.0);
    r.mark = SignificanceMark(r.p_value);
    result.categories.push_back(std::move(r));
  }
  return result;
}

std::vector<StoryCategoryCounts> CountMotivationCategories(std::span<const InferenceRecord> records,
                                                           const std::map<std::string, Gender>& genders,
                                                           const CategoryDictionary& dict) {
  std::map<std::string, StoryCategoryCounts> by_story;
  for (const auto& [id, gender] : genders) {
    if (gender == Gender::kUnresolved) continue;
    by_story[id] = StoryCategoryCounts{id, gender, 0.0, {}};
  }
  for (const auto& r : records) {
    if (r.axis != SocialAxis::kPrMot) continue;
    auto it = by_story.find(r.story_id);
    if (it == by_story.end()) continue;
    for (const auto& token : NormalizePhrases(r.phrases)) {
      it->second.total_tokens += 1.0;
      for (const auto& c : dict.Match(token)) it->second.counts[c] += 1.0;
    }
  }
  std::vector<StoryCategoryCounts> out;
  for (auto& [id, s] : by_story) out.push_back(std::move(s));
  return out;
}

}  // namespace protaudit
