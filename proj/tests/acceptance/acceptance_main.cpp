// One PASS/FAIL line per acceptance criterion; exits non-zero when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "protaudit/error.hpp"
#include "protaudit/inference.hpp"
#include "protaudit/lexicons.hpp"
#include "protaudit/metrics.hpp"
#include "protaudit/probe.hpp"
#include "protaudit/protagonist.hpp"
#include "protaudit/regression.hpp"
#include "test_support.hpp"

using namespace protaudit;
namespace ts = testsupport;

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void Fail(const std::string& why) {
    if (pass) detail.str("");
    if (!pass) detail << "; ";
    pass = false;
    detail << why;
  }
};

std::vector<std::string> RandomSubset(std::mt19937_64& rng, const std::vector<std::string>& pool, std::size_t k) {
  std::vector<std::string> v = pool;
  std::shuffle(v.begin(), v.end(), rng);
  v.resize(k);
  return v;
}

Outcome Eq1Oracle() {
  Outcome o;
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  const EmbeddingStore store = ts::RandomStore(rng, 50, 16);
  std::vector<std::string> pool = store.words();
  double worst = 0.0;
  for (int c = 0; c < 1000; ++c) {
    const std::string x = pool[rng() % pool.size()];
    auto words = RandomSubset(rng, pool, 5);
    if (c % 7 == 0) words[rng() % words.size()] = "oov" + std::to_string(c);
    const Lexicon lex = MakeLexicon("L", words);
    const double got = *AssociationScore(x, lex, store);
    const double want = ts::ReferenceAssociation(x, words, store);
    worst = std::max(worst, std::abs(got - want));
  }
  const double secs = Seconds(start);
  if (worst > 1e-9) o.Fail("max deviation " + std::to_string(worst));
  if (secs >= 5.0) o.Fail("runtime " + std::to_string(secs) + " s");
  if (o.pass) o.detail << "1000 cases, max deviation " << worst << ", " << secs << " s";
  return o;
}

Outcome Eq2Properties() {
  Outcome o;
  std::mt19937_64 rng(202);
  const EmbeddingStore store = ts::RandomStore(rng, 50, 16);
  const auto& pool = store.words();
  std::size_t asym = 0, range = 0, ref = 0;
  for (int c = 0; c < 1000; ++c) {
    auto ten = RandomSubset(rng, pool, 10);
    const std::vector<std::string> a(ten.begin(), ten.begin() + 5), b(ten.begin() + 5, ten.end());
    const Lexicon la = MakeLexicon("A", a), lb = MakeLexicon("B", b);
    const SemanticAxis ab = BuildSemanticAxis(la, lb, store);
    const SemanticAxis ba = BuildSemanticAxis(lb, la, store);
    bool flipped = ab.vector.size() == ba.vector.size();
    for (std::size_t i = 0; flipped && i < ab.vector.size(); ++i) flipped = ba.vector[i] == -ab.vector[i];
    const auto want = ts::ReferenceAxis(a, b, store);
    for (std::size_t i = 0; i < want.size(); ++i) ref += std::abs(want[i] - ab.vector[i]) > 1e-12;
    const std::string x = pool[rng() % pool.size()];
    const double s1 = *AxisScore(x, ab, store), s2 = *AxisScore(x, ba, store);
    if (!flipped || s2 != -s1) ++asym;
    if (s1 < -1.0 || s1 > 1.0) ++range;
  }
  bool degenerate = false;
  try {
    const Lexicon same = MakeLexicon("A", std::vector<std::string>{pool[0], pool[1], pool[2]});
    BuildSemanticAxis(same, same, store);
  } catch (const DegenerateAxisError&) {
    degenerate = true;
  }
  if (asym) o.Fail(std::to_string(asym) + " cases without an exact sign flip");
  if (range) o.Fail(std::to_string(range) + " scores outside [-1, 1]");
  if (ref) o.Fail(std::to_string(ref) + " axis components off the reference means");
  if (!degenerate) o.Fail("A = B did not raise the degenerate-axis error");
  if (o.pass) o.detail << "1000 cases antisymmetric and in range, A = B rejected";
  return o;
}

Outcome ScaleInvariance() {
  Outcome o;
  std::mt19937_64 rng(303);
  const EmbeddingStore store = ts::RandomStore(rng, 50, 16);
  const EmbeddingStore scaled = store.Scaled(7.3);
  const auto& pool = store.words();
  const std::vector<std::string> lw(pool.begin(), pool.begin() + 5);
  const std::vector<std::string> aw(pool.begin() + 5, pool.begin() + 10);
  const std::vector<std::string> bw(pool.begin() + 10, pool.begin() + 15);
  const Lexicon lex = MakeLexicon("L", lw), la = MakeLexicon("A", aw), lb = MakeLexicon("B", bw);
  const SemanticAxis axis = BuildSemanticAxis(la, lb, store), axis7 = BuildSemanticAxis(la, lb, scaled);
  double worst = 0.0;
  std::vector<GenderValue> assoc, assoc7, power, power7;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const Gender g = i % 2 ? Gender::kMale : Gender::kFemale;
    const double s = *AssociationScore(pool[i], lex, store), s7 = *AssociationScore(pool[i], lex, scaled);
    const double p = *AxisScore(pool[i], axis, store), p7 = *AxisScore(pool[i], axis7, scaled);
    worst = std::max({worst, std::abs(s - s7), std::abs(p - p7)});
    assoc.push_back({g, s});
    assoc7.push_back({g, s7});
    power.push_back({g, p});
    power7.push_back({g, p7});
  }
  auto values = [](const std::vector<GenderValue>& v) {
    std::vector<double> out;
    for (const auto& x : v) out.push_back(x.value);
    return out;
  };
  for (const auto& [u, v] : {std::pair{&assoc, &assoc7}, std::pair{&power, &power7}}) {
    const auto z = ZScores(values(*u)), z7 = ZScores(values(*v));
    for (std::size_t i = 0; i < z.size(); ++i) worst = std::max(worst, std::abs(z[i] - z7[i]));
    const auto m = ZScoreGroupMedians(*u), m7 = ZScoreGroupMedians(*v);
    worst = std::max({worst, std::abs(*m.female - *m7.female), std::abs(*m.male - *m7.male)});
  }
  if (worst > 1e-9) o.Fail("max change " + std::to_string(worst));
  if (o.pass) o.detail << "max change " << worst << " over scores, z-scores and medians";
  return o;
}

Outcome ZScoreContract() {
  Outcome o;
  std::mt19937_64 rng(404);
  double worst_mean = 0.0, worst_std = 0.0;
  for (int d = 0; d < 100; ++d) {
    const std::size_t n = 2 + rng() % 499;
    std::normal_distribution<double> dist(std::uniform_real_distribution<double>(-50, 50)(rng),
                                          std::uniform_real_distribution<double>(0.01, 20)(rng));
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    const auto z = ZScores(v);
    long double mean = 0, sq = 0;
    for (double x : z) mean += x;
    mean /= n;
    for (double x : z) sq += (x - mean) * (x - mean);
    const double sd = static_cast<double>(std::sqrt(sq / n));
    worst_mean = std::max(worst_mean, static_cast<double>(std::abs(mean)));
    worst_std = std::max(worst_std, std::abs(sd - 1.0));
  }
  if (worst_mean >= 1e-9) o.Fail("|mean| reached " + std::to_string(worst_mean));
  if (worst_std >= 1e-9) o.Fail("|std - 1| reached " + std::to_string(worst_std));
  if (o.pass) o.detail << "100 datasets, max |mean| " << worst_mean << ", max |std - 1| " << worst_std;
  return o;
}

Outcome ProtagonistFixture() {
  Outcome o;
  const auto gold = ts::LoadGoldStories();
  std::size_t checks = 0, fallback_runs = 0;
  for (const auto& g : gold) {
    const std::string id = g.story.story_id;
    int prot = -1;
    if (g.clusters.empty()) {
      try {
        SelectProtagonist(g.clusters);
        o.Fail(id + ": empty cluster list selected a protagonist");
      } catch (const NoProtagonistError&) {
      }
    } else {
      prot = SelectProtagonist(g.clusters);
    }
    if (prot != g.protagonist) o.Fail(id + ": protagonist " + std::to_string(prot));
    const Gender gender = prot < 0 ? Gender::kUnresolved : ResolveGender(g.clusters[prot]);
    if (ToString(gender) != g.gender) o.Fail(id + ": gender " + std::string(ToString(gender)));
    if (prot >= 0 && PronounCounts(g.clusters[prot]) != g.pronoun_counts) o.Fail(id + ": pronoun counts");
    const AnonymizedStory anon = Anonymize(g.story, g.clusters, g.protagonist);
    std::vector<std::string> texts;
    for (const auto& s : anon.sentences) texts.push_back(s.text);
    if (texts != g.anonymized) o.Fail(id + ": anonymized text");
    std::vector<std::string> roles;
    for (Role r : AssignSentenceRoles(g.story, g.clusters, g.protagonist)) roles.emplace_back(ToString(r));
    if (roles != g.roles) o.Fail(id + ": roles");
    const auto leaks = ts::ScanForLeaks(texts, g.clusters);
    if (!leaks.empty()) o.Fail(id + ": leaked '" + leaks.front() + "'");
    checks += 5;

    if (g.fallback) {
      ++fallback_runs;
      FallbackCorefBackend backend;
      const AnnotatedStory a = AnnotateStory(g.story, backend);
      std::vector<std::string> ft, fr;
      for (const auto& s : a.anonymized.sentences) ft.push_back(s.text);
      for (Role r : a.annotation.sentence_roles) fr.emplace_back(ToString(r));
      if (a.clusters != g.clusters) o.Fail(id + ": fallback clusters differ from the hand clusters");
      if (a.annotation.protagonist_cluster != g.protagonist || ToString(a.annotation.gender) != g.gender ||
          ft != g.anonymized || fr != g.roles) {
        o.Fail(id + ": fallback pipeline differs");
      }
      if (!ts::ScanForLeaks(ft, a.clusters).empty()) o.Fail(id + ": fallback output leaks");
    }
  }
  if (o.pass) {
    o.detail << gold.size() << " stories, " << checks << " checks exact, zero leaks; " << fallback_runs
             << " also end to end through the fallback resolver";
  }
  return o;
}

Outcome ProbeCalibration() {
  Outcome o;
  const auto start = Clock::now();
  int in_band = 0;
  double worst_planted = 1.0;
  std::ostringstream accs;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto same = ts::SyntheticProbeCorpus(seed, 400, false);
    const double acc = BowLeakageProbe(same.stories, same.genders, seed).accuracy;
    in_band += acc >= 0.40 && acc <= 0.60;
    accs << (seed == 1 ? "" : " ") << acc;
    const auto planted = ts::SyntheticProbeCorpus(seed, 400, true);
    worst_planted = std::min(worst_planted, BowLeakageProbe(planted.stories, planted.genders, seed).accuracy);
  }
  const double secs = Seconds(start);
  if (in_band < 9) o.Fail(std::to_string(in_band) + "/10 null seeds in [0.40, 0.60] (" + accs.str() + ")");
  if (worst_planted <= 0.95) o.Fail("planted accuracy fell to " + std::to_string(worst_planted));
  if (secs >= 60.0) o.Fail("runtime " + std::to_string(secs) + " s");
  if (o.pass) {
    o.detail << in_band << "/10 null seeds in band (" << accs.str() << "), planted min " << worst_planted << ", "
             << secs << " s";
  }
  return o;
}

Outcome RegressionRecovery() {
  Outcome o;
  const auto corpus = ts::PlantedCategoryCorpus(7, 200, 0.9, 0.1);
  const std::vector<std::string> cats = {"C"};
  const RegressionResult r = MotivationRegression(corpus, cats);
  if (r.categories.size() != 1) {
    o.Fail("planted category was not fitted");
    return o;
  }
  const auto& c = r.categories.front();
  const auto perm = ts::PermutationTest(corpus, "C", 10000, 99);
  if (!(c.coefficient > 0)) o.Fail("coefficient " + std::to_string(c.coefficient));
  if (!(c.p_value < 0.01)) o.Fail("p " + std::to_string(c.p_value));
  if ((c.coefficient > 0) != (perm.statistic > 0)) o.Fail("sign disagrees with the permutation oracle");
  if ((c.p_value < 0.01) != (perm.p_value < 0.01)) o.Fail("significance disagrees with the permutation oracle");
  if (o.pass) {
    o.detail << "coefficient " << c.coefficient << ", p " << c.p_value << "; permutation diff " << perm.statistic
             << ", p " << perm.p_value << " (10000 permutations)";
  }
  return o;
}

Outcome EndToEndGolden() {
  Outcome o;
  const auto config = ts::SourceDir() / "data" / "fixture" / "audit.toml";
  std::vector<std::string> reports;
  double slowest = 0.0;
  for (int run = 0; run < 2; ++run) {
    ts::TempDir ws("golden");
    const std::string cmd = "\"" + ts::AuditBinary().string() + "\" --config \"" + config.string() + "\" --out \"" +
                            ws.path().string() + "\" run-all > /dev/null 2>&1";
    const auto start = Clock::now();
    const int rc = std::system(cmd.c_str());
    slowest = std::max(slowest, Seconds(start));
    if (rc != 0) {
      o.Fail("run-all exited with status " + std::to_string(rc));
      return o;
    }
    reports.push_back(ts::Slurp(ws.path() / "report.json"));
  }
  const std::string golden = ts::Slurp(ts::SourceDir() / "tests" / "golden" / "report.json");
  if (reports[0] != reports[1]) o.Fail("two runs differ");
  if (golden.empty()) o.Fail("golden file missing");
  else if (reports[0] != golden) o.Fail("report.json differs from the golden file");
  if (slowest >= 30.0) o.Fail("runtime " + std::to_string(slowest) + " s");
  if (o.pass) o.detail << "2 runs byte-identical and equal to the golden (" << reports[0].size() << " bytes), slowest "
                       << slowest << " s";
  return o;
}

Outcome AxisMappingTotality() {
  Outcome o;
  const std::map<SocialAxis, std::pair<std::vector<Dimension>, Role>> expected = {
      {SocialAxis::kPrAtt, {{Dimension::kXAttr}, Role::kProtagonistAgent}},
      {SocialAxis::kPrMe, {{Dimension::kXReact}, Role::kProtagonistAgent}},
      {SocialAxis::kOtMePr, {{Dimension::kOReact}, Role::kProtagonistAgent}},
      {SocialAxis::kPrMeOt, {{Dimension::kOReact}, Role::kOtherAgent}},
      {SocialAxis::kPrMot, {{Dimension::kXIntent, Dimension::kXWant, Dimension::kXNeed}, Role::kProtagonistAgent}}};
  for (SocialAxis a : kAllAxes) {
    const AxisMapping m = AxisToDimensions(a);
    const auto& [dims, role] = expected.at(a);
    if (m.dimensions != dims || m.role != role) o.Fail(std::string(ToString(a)) + " maps differently");
  }
  if (kAllAxes.size() != expected.size()) o.Fail("axis enumeration size");

  const Corpus corpus = LoadCorpus(ts::SourceDir() / "data" / "fixture" / "corpus.jsonl", CorpusFormat::kJsonl);
  FallbackCorefBackend coref;
  std::vector<AnonymizedStory> anonymized;
  std::vector<ProtagonistAnnotation> annotations;
  std::size_t eligible = 0;
  for (const auto& s : corpus.stories) {
    const AnnotatedStory a = AnnotateStory(s, coref);
    if (a.annotation.gendered()) {
      for (Role r : a.annotation.sentence_roles) eligible += r == Role::kProtagonistAgent;
    }
    anonymized.push_back(a.anonymized);
    annotations.push_back(a.annotation);
  }
  auto backend = StubInferenceBackend::FromFile(ts::SourceDir() / "data" / "fixture" / "stub_inference.json");
  InferenceCache cache;
  const PassResult pass = RunInferencePass(anonymized, annotations, *backend, cache);
  std::size_t mot = 0;
  std::set<std::pair<std::string, std::size_t>> sentences;
  for (const auto& r : pass.records) {
    if (r.axis != SocialAxis::kPrMot) continue;
    ++mot;
    sentences.insert({r.story_id, r.sentence_index});
  }
  if (!pass.failures.empty()) o.Fail("backend failures in the pass");
  if (mot != 3 * eligible) o.Fail(std::to_string(mot) + " PR_MOT records for " + std::to_string(eligible) +
                                  " eligible sentences");
  if (sentences.size() != eligible) o.Fail("PR_MOT records do not cover every eligible sentence");
  if (o.pass) o.detail << "5 axes as listed; " << mot << " PR_MOT records = 3 x " << eligible << " sentences";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"eq1-oracle-equivalence", Eq1Oracle},
      {"eq2-axis-properties", Eq2Properties},
      {"scale-invariance", ScaleInvariance},
      {"zscore-contract", ZScoreContract},
      {"protagonist-fixture", ProtagonistFixture},
      {"leakage-probe-calibration", ProbeCalibration},
      {"regression-recovery", RegressionRecovery},
      {"end-to-end-golden", EndToEndGolden},
      {"axis-mapping-totality", AxisMappingTotality},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.Fail(std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail.str() << "\n";
    failed += !o.pass;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
