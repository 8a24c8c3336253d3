#include "protaudit/inference.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "protaudit/error.hpp"
#include "protaudit/text.hpp"

namespace protaudit {
namespace {

using nlohmann::json;

const std::unordered_set<std::string>& Stopwords() {
  static const std::unordered_set<std::string> words = {
      "to",   "be",   "the",  "a",     "an",   "of",   "none", "and",  "or",    "in",
      "on",   "at",   "for",  "with",  "is",   "are",  "was",  "were", "been",  "being",
      "it",   "its",  "this", "that",  "some", "his",  "her",  "hers", "their", "them",
      "him",  "he",   "she",  "they",  "very", "more", "has",  "have", "had",   "do",
      "does", "did",  "not",  "so",    "as",   "by",   "from", "up",   "out",   "into",
      "about", "x",   "y",    "personx", "persony", "personz"};
  return words;
}

bool IsPlaceholderToken(std::string_view lower) {
  if (lower.size() <= 7 || lower.substr(0, 7) != "personn") return false;
  return std::all_of(lower.begin() + 7, lower.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string_view TrimPunct(std::string_view s) {
  while (!s.empty() && text::IsPunct(s.front())) s.remove_prefix(1);
  while (!s.empty() && text::IsPunct(s.back())) s.remove_suffix(1);
  return s;
}

template <typename Enum, std::size_t N>
std::optional<Enum> ParseEnum(std::string_view s, const std::array<Enum, N>& all) {
  for (Enum e : all) {
    if (ToString(e) == s) return e;
  }
  return std::nullopt;
}

}  // namespace

std::string_view ToString(SocialAxis a) {
  switch (a) {
    case SocialAxis::kPrAtt:
      return "PR_ATT";
    case SocialAxis::kPrMe:
      return "PR_ME";
    case SocialAxis::kOtMePr:
      return "OT_ME_PR";
    case SocialAxis::kPrMeOt:
      return "PR_ME_OT";
    case SocialAxis::kPrMot:
      break;
  }
  return "PR_MOT";
}

std::string_view ToString(Dimension d) {
  switch (d) {
    case Dimension::kXAttr:
      return "xAttr";
    case Dimension::kXReact:
      return "xReact";
    case Dimension::kOReact:
      return "oReact";
    case Dimension::kXIntent:
      return "xIntent";
    case Dimension::kXWant:
      return "xWant";
    case Dimension::kXNeed:
      break;
  }
  return "xNeed";
}

std::optional<SocialAxis> ParseAxis(std::string_view s) { return ParseEnum(s, kAllAxes); }
std::optional<Dimension> ParseDimension(std::string_view s) { return ParseEnum(s, kAllDimensions); }

AxisMapping AxisToDimensions(SocialAxis axis) {
  switch (axis) {
    case SocialAxis::kPrAtt:
      return {{Dimension::kXAttr}, Role::kProtagonistAgent};
    case SocialAxis::kPrMe:
      return {{Dimension::kXReact}, Role::kProtagonistAgent};
    case SocialAxis::kOtMePr:
      return {{Dimension::kOReact}, Role::kProtagonistAgent};
    case SocialAxis::kPrMeOt:
      return {{Dimension::kOReact}, Role::kOtherAgent};
    case SocialAxis::kPrMot:
      break;
  }
  return {{Dimension::kXIntent, Dimension::kXWant, Dimension::kXNeed}, Role::kProtagonistAgent};
}

// --- stub backend ----------------------------------------------------------

StubInferenceBackend::StubInferenceBackend(std::string id, std::string version, Table exact,
                                           Table keywords, std::vector<std::string> fallback)
    : id_(std::move(id)),
      version_(std::move(version)),
      exact_(std::move(exact)),
      keywords_(std::move(keywords)),
      fallback_(std::move(fallback)) {}

std::unique_ptr<StubInferenceBackend> StubInferenceBackend::FromFile(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(text::ReadFile(path.string()));
  } catch (const json::exception& e) {
    throw ParseError(path.string(), 0, std::string("invalid stub fixture: ") + e.what());
  }
  auto table = [&](const char* key) {
    Table t;
    if (!doc.contains(key)) return t;
    for (const auto& [dim, entries] : doc.at(key).items()) {
      if (!ParseDimension(dim)) throw ParseError(path.string(), 0, "unknown dimension '" + dim + "'");
      for (const auto& [k, phrases] : entries.items()) {
        t[dim][k] = phrases.get<std::vector<std::string>>();
      }
    }
    return t;
  };
  try {
    return std::make_unique<StubInferenceBackend>(doc.value("backend_id", "stub"), doc.value("backend_version", "0"),
                                                  table("exact"), table("keywords"),
                                                  doc.value("default", std::vector<std::string>{"none"}));
  } catch (const json::exception& e) {
    throw ParseError(path.string(), 0, std::string("malformed stub fixture: ") + e.what());
  }
}

std::vector<std::string> StubInferenceBackend::Generate(const InferenceRequest& request) {
  ++calls_;
  const std::string dim(ToString(request.dimension));
  if (auto d = exact_.find(dim); d != exact_.end()) {
    if (auto e = d->second.find(request.sentence); e != d->second.end()) return e->second;
  }
  std::vector<std::string> out;
  if (auto d = keywords_.find(dim); d != keywords_.end()) {
    for (const auto& tok : Tokenize(request.sentence)) {
      auto k = d->second.find(text::ToLower(tok.surface));
      if (k == d->second.end()) continue;
      for (const auto& p : k->second) {
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
      }
    }
  }
  if (out.empty()) return fallback_;
  if (request.beam_size > 0 && out.size() > static_cast<std::size_t>(request.beam_size)) {
    out.resize(static_cast<std::size_t>(request.beam_size));
  }
  return out;
}

// --- cache -----------------------------------------------------------------

std::string CacheKey::Serialize() const {
  return sentence_sha256 + "|" + std::string(ToString(dimension)) + "|" + backend_id + "|" + backend_version;
}

CacheKey CacheKey::For(std::string_view sentence, Dimension dimension, const InferenceBackend& backend) {
  return CacheKey{text::Sha256Hex(sentence), dimension, backend.Id(), backend.Version()};
}

namespace {

std::string EntryLine(const CacheKey& key, const std::vector<std::string>& phrases) {
  nlohmann::ordered_json j;
  j["sentence_sha256"] = key.sentence_sha256;
  j["dimension"] = ToString(key.dimension);
  j["backend_id"] = key.backend_id;
  j["backend_version"] = key.backend_version;
  j["phrases"] = phrases;
  return j.dump();
}

}  // namespace

InferenceCache::InferenceCache(std::filesystem::path journal) : journal_(std::move(journal)) {
  std::ifstream in(*journal_);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    if (text::Trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      auto dim = ParseDimension(j.at("dimension").get<std::string>());
      if (!dim) {
        ++corrupt_lines_;
        continue;
      }
      Entry e{CacheKey{j.at("sentence_sha256").get<std::string>(), *dim, j.at("backend_id").get<std::string>(),
                       j.at("backend_version").get<std::string>()},
              j.at("phrases").get<std::vector<std::string>>()};
      entries_.insert_or_assign(e.key.Serialize(), std::move(e));
    } catch (const json::exception&) {
      // A torn final line after an interrupted write.
      ++corrupt_lines_;
    }
  }
}

std::optional<std::vector<std::string>> InferenceCache::Get(const CacheKey& key) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(key.Serialize());
  if (it == entries_.end()) return std::nullopt;
  return it->second.phrases;
}

void InferenceCache::Put(const CacheKey& key, const std::vector<std::string>& phrases) {
  std::string line;
  try {
    line = EntryLine(key, phrases);
  } catch (const json::exception& e) {
    throw BackendError(std::string("backend output is not valid UTF-8: ") + e.what());
  }
  std::unique_lock lock(mutex_);
  entries_.insert_or_assign(key.Serialize(), Entry{key, phrases});
  if (journal_) {
    std::ofstream out(*journal_, std::ios::app | std::ios::binary);
    if (!out) throw ValidationError("cannot append to cache journal " + journal_->string());
    out << line << '\n';
  }
}

void InferenceCache::Compact() {
  std::unique_lock lock(mutex_);
  if (!journal_) return;
  const std::filesystem::path tmp = journal_->string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    for (const auto& [k, e] : entries_) out << EntryLine(e.key, e.phrases) << '\n';
  }
  std::filesystem::rename(tmp, *journal_);
  corrupt_lines_ = 0;
}

std::size_t InferenceCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

// --- inference -------------------------------------------------------------

namespace {

struct InferOutcome {
  std::vector<std::string> phrases;
  bool cache_hit = false;
};

std::string TruncateForBackend(std::string_view sentence, std::size_t limit, const WarningSink& warn) {
  if (limit == 0 || sentence.size() <= limit) return std::string(sentence);
  std::size_t cut = limit;
  while (cut > 0 && !text::IsSpace(sentence[cut])) --cut;
  if (cut == 0) cut = limit;
  if (warn) {
    warn("sentence of " + std::to_string(sentence.size()) + " chars truncated to " + std::to_string(cut) +
         " for backend limit " + std::to_string(limit));
  }
  return std::string(text::Trim(sentence.substr(0, cut)));
}

InferOutcome InferImpl(std::string_view sentence, Dimension dimension, InferenceBackend& backend,
                       InferenceCache* cache, const InferOptions& options, std::mutex* backend_mutex) {
  InferenceRequest request{TruncateForBackend(sentence, backend.MaxInputChars(), options.warn), dimension,
                           options.beam_size};
  const CacheKey key = CacheKey::For(request.sentence, dimension, backend);
  if (cache) {
    if (auto hit = cache->Get(key)) return {std::move(*hit), true};
  }
  std::vector<std::string> phrases;
  try {
    if (backend_mutex) {
      std::lock_guard lock(*backend_mutex);
      phrases = backend.Generate(request);
    } else {
      phrases = backend.Generate(request);
    }
  } catch (const BackendError&) {
    throw;
  } catch (const std::exception& e) {
    throw BackendError(std::string("inference backend failed: ") + e.what());
  }
  if (cache) cache->Put(key, phrases);
  return {std::move(phrases), false};
}

}  // namespace

std::vector<std::string> Infer(std::string_view sentence, Dimension dimension, InferenceBackend& backend,
                               InferenceCache* cache, const InferOptions& options) {
  return InferImpl(sentence, dimension, backend, cache, options, nullptr).phrases;
}

bool IsNoneSentinel(std::string_view phrase) { return text::ToLower(text::Trim(phrase)) == "none"; }

std::vector<std::string> NormalizePhrases(std::span<const std::string> phrases) {
  std::vector<std::string> out;
  for (const auto& phrase : phrases) {
    for (auto piece : text::SplitWhitespace(phrase)) {
      const std::string lower = text::ToLower(TrimPunct(piece));
      std::string_view stem = lower;
      if (stem.size() > 2 && stem.substr(stem.size() - 2) == "'s") stem.remove_suffix(2);
      if (lower.empty() || Stopwords().count(lower) || Stopwords().count(std::string(stem)) ||
          IsPlaceholderToken(stem)) {
        continue;
      }
      out.push_back(lower);
    }
  }
  return out;
}

PassResult RunInferencePass(std::span<const AnonymizedStory> stories,
                            std::span<const ProtagonistAnnotation> annotations, InferenceBackend& backend,
                            InferenceCache& cache, const PassOptions& options) {
  std::unordered_map<std::string_view, const ProtagonistAnnotation*> by_id;
  for (const auto& a : annotations) by_id[a.story_id] = &a;
  for (const auto& s : stories) {
    auto it = by_id.find(s.story_id);
    if (it == by_id.end()) {
      throw ValidationError("story '" + s.story_id + "' has no protagonist annotation");
    }
    if (it->second->sentence_roles.size() != s.sentences.size()) {
      throw ValidationError("story '" + s.story_id + "': sentence roles do not match sentence count");
    }
  }

  struct Slot {
    std::vector<InferenceRecord> records;
    std::optional<StoryFailure> failure;
    bool skipped = false;
    std::size_t calls = 0;
    std::size_t hits = 0;
  };
  std::vector<Slot> slots(stories.size());
  std::mutex backend_mutex;
  std::mutex* serialize = backend.ThreadSafe() ? nullptr : &backend_mutex;
  const InferOptions infer_options{options.beam_size, options.warn};
  const std::string backend_id = backend.Id();
  const std::string backend_version = backend.Version();

  auto process = [&](std::size_t i) {
    const AnonymizedStory& story = stories[i];
    const ProtagonistAnnotation& ann = *by_id.at(story.story_id);
    Slot& slot = slots[i];
    if (!ann.gendered()) {
      slot.skipped = true;
      return;
    }
    try {
      for (const auto& sentence : story.sentences) {
        const Role role = ann.sentence_roles[sentence.index];
        for (SocialAxis axis : kAllAxes) {
          const AxisMapping mapping = AxisToDimensions(axis);
          if (mapping.role != role) continue;
          for (Dimension dim : mapping.dimensions) {
            InferOutcome outcome = InferImpl(sentence.text, dim, backend, &cache, infer_options, serialize);
            (outcome.cache_hit ? slot.hits : slot.calls) += 1;
            InferenceRecord rec{story.story_id, sentence.index, axis, dim, {}, backend_id, backend_version};
            for (auto& p : outcome.phrases) {
              if (!IsNoneSentinel(p)) rec.phrases.push_back(std::move(p));
            }
            slot.records.push_back(std::move(rec));
          }
        }
      }
    } catch (const Error& e) {
      slot.records.clear();
      slot.failure = StoryFailure{story.story_id, e.what()};
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, stories.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < stories.size(); ++i) process(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < stories.size(); i = next++) process(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  PassResult result;
  for (auto& slot : slots) {
    result.backend_calls += slot.calls;
    result.cache_hits += slot.hits;
    if (slot.skipped) ++result.skipped_unresolved;
    if (slot.failure) result.failures.push_back(std::move(*slot.failure));
    for (auto& r : slot.records) result.records.push_back(std::move(r));
  }
  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const InferenceRecord& a, const InferenceRecord& b) {
                     return std::tie(a.story_id, a.sentence_index, a.axis, a.dimension) <
                            std::tie(b.story_id, b.sentence_index, b.axis, b.dimension);
                   });
  std::sort(result.failures.begin(), result.failures.end(),
            [](const StoryFailure& a, const StoryFailure& b) { return a.story_id < b.story_id; });
  return result;
}

}  // namespace protaudit
