#include "protaudit/protagonist.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "protaudit/error.hpp"
#include "protaudit/text.hpp"

namespace protaudit {
namespace {

// Capitalized words that start sentences without naming anyone.
const std::unordered_set<std::string>& NonNameWords() {
  static const std::unordered_set<std::string> words = {
      "a", "an", "the", "this", "that", "these", "those", "it", "its", "there", "here", "then",
      "when", "while", "after", "before", "as", "at", "on", "in", "into", "of", "for", "from",
      "with", "without", "by", "to", "and", "but", "or", "so", "yet", "nor", "if", "because",
      "since", "until", "once", "although", "though", "one", "two", "three", "some", "many",
      "most", "all", "every", "each", "everyone", "everybody", "someone", "somebody", "nobody",
      "no", "not", "nothing", "everything", "something", "anything", "today", "tonight",
      "yesterday", "tomorrow", "later", "soon", "now", "finally", "eventually", "suddenly",
      "unfortunately", "fortunately", "luckily", "sadly", "thankfully", "instead", "also",
      "still", "just", "even", "only", "never", "always", "sometimes", "afterwards",
      "afterward", "meanwhile", "next", "first", "last", "what", "why", "how", "where", "who",
      "which", "whose", "whom", "yes", "oh", "well", "please", "thanks", "hello", "hi", "okay",
      "ok", "let", "during", "over", "under", "about", "around", "through", "up", "down", "out",
      "off", "away", "back", "again", "other", "another", "both", "either", "neither", "such",
      "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday", "january",
      "february", "march", "april", "may", "june", "july", "august", "september", "october",
      "november", "december", "christmas", "halloween", "thanksgiving", "easter", "you",
      "your", "yours", "yourself", "everywhere", "nowhere", "somewhere", "unless", "whenever",
      "however", "therefore", "thus", "besides", "overall", "luckily", "unluckily", "later"};
  return words;
}

const std::unordered_set<std::string>& Honorifics() {
  static const std::unordered_set<std::string> words = {"mr.", "mrs.", "ms.", "dr.", "prof.",
                                                        "mr",  "mrs",  "ms",  "dr",  "prof"};
  return words;
}

// Words after "her" that signal an object pronoun rather than a determiner.
const std::unordered_set<std::string>& NonNounFollowers() {
  static const std::unordered_set<std::string> words = {
      "a", "an", "the", "to", "that", "this", "these", "those", "and", "or", "but", "for",
      "with", "at", "in", "on", "up", "down", "out", "off", "back", "away", "again", "so",
      "very", "too", "some", "any", "all", "it", "about", "from", "into", "by", "as", "if",
      "when", "what", "how", "why", "because", "until", "after", "before", "over", "home",
      "there", "here", "now", "then", "more", "no", "not", "one", "something", "anything",
      "everything", "nothing", "soon", "later", "today", "tonight", "yesterday", "tomorrow",
      "well", "his", "her", "their", "my", "our", "your", "its", "around", "through", "across",
      "while", "where", "which", "who", "alone", "once", "twice", "first", "last", "again"};
  return words;
}

enum class PronounClass { kMasculine, kFeminine, kFirstSingular, kFirstPlural, kThirdPlural };

PronounClass ClassOf(std::string_view surface) {
  if (text::IsMasculinePronoun(surface)) return PronounClass::kMasculine;
  if (text::IsFemininePronoun(surface)) return PronounClass::kFeminine;
  const std::string lower = text::ToLower(surface);
  if (lower == "we" || lower == "us" || lower == "our" || lower == "ours" || lower == "ourselves") {
    return PronounClass::kFirstPlural;
  }
  if (text::IsFirstPersonPronoun(surface)) return PronounClass::kFirstSingular;
  return PronounClass::kThirdPlural;
}

bool IsNameToken(std::string_view surface, const std::unordered_set<std::string>& lowercase_words) {
  if (surface.empty() || !std::isupper(static_cast<unsigned char>(surface.front()))) return false;
  for (char c : surface) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '\'') return false;
  }
  if (text::IsPronoun(surface)) return false;
  const std::string lower = text::ToLower(surface);
  return NonNameWords().count(lower) == 0 && lowercase_words.count(lower) == 0;
}

bool IsReplacementPossessive(const Mention& m, const Sentence& sentence) {
  if (m.kind != MentionKind::kPronoun) return false;
  const std::string lower = text::ToLower(m.surface);
  if (text::IsStandalonePossessive(lower) || lower == "my" || lower == "our" || lower == "their") {
    return true;
  }
  if (lower != "her") return false;
  for (const Token& t : sentence.tokens) {
    if (t.char_start < m.char_end) continue;
    if (text::IsPunctOnly(t.surface)) return false;
    if (!std::isalpha(static_cast<unsigned char>(t.surface.front()))) return false;
    return NonNounFollowers().count(text::ToLower(t.surface)) == 0;
  }
  return false;
}

MentionKind KindOf(std::string_view surface) {
  if (text::IsPronoun(surface)) return MentionKind::kPronoun;
  if (!surface.empty() && std::isupper(static_cast<unsigned char>(surface.front()))) {
    return MentionKind::kName;
  }
  return MentionKind::kNominal;
}

auto Position(const Mention& m) { return std::make_tuple(m.sentence_index, m.char_start); }

std::string PlaceholderFor(std::size_t other_index) {
  if (other_index == 1) return "PersonY";
  if (other_index == 2) return "PersonZ";
  return "PersonN" + std::to_string(other_index);
}

}  // namespace

std::string_view ToString(MentionKind k) {
  switch (k) {
    case MentionKind::kName:
      return "NAME";
    case MentionKind::kPronoun:
      return "PRONOUN";
    case MentionKind::kNominal:
      break;
  }
  return "NOMINAL";
}

Story AnonymizedStory::ToStory(const Story& original) const {
  Story s;
  s.story_id = story_id;
  s.title = original.title;
  s.source = original.source;
  s.sentences = sentences;
  for (const auto& sent : sentences) s.token_count += sent.tokens.size();
  return s;
}

CorefRequest MakeCorefRequest(const Story& story) {
  CorefRequest req;
  req.story_id = story.story_id;
  for (const auto& s : story.sentences) {
    if (!req.text.empty()) req.text.push_back(' ');
    const std::size_t begin = req.text.size();
    req.text += s.text;
    req.sentence_offsets.emplace_back(begin, req.text.size());
  }
  return req;
}

std::vector<std::vector<CorefSpan>> FallbackCorefBackend::Resolve(const CorefRequest& request) {
  struct Candidate {
    CorefSpan span;
    std::string surface;
    bool name = false;
  };

  std::vector<std::vector<Token>> tokens;
  std::unordered_set<std::string> lowercase_words;
  for (auto [b, e] : request.sentence_offsets) {
    if (b > e || e > request.text.size()) throw BackendError("bad sentence offsets", request.story_id, false);
    tokens.push_back(Tokenize(std::string_view(request.text).substr(b, e - b), options_));
    for (const auto& t : tokens.back()) {
      if (std::islower(static_cast<unsigned char>(t.surface.front()))) {
        lowercase_words.insert(t.surface);
      }
    }
  }

  // Candidate mentions in reading order.
  std::vector<Candidate> candidates;
  for (std::size_t s = 0; s < tokens.size(); ++s) {
    const std::string_view sentence =
        std::string_view(request.text)
            .substr(request.sentence_offsets[s].first,
                    request.sentence_offsets[s].second - request.sentence_offsets[s].first);
    const auto& toks = tokens[s];
    std::size_t i = 0;
    while (i < toks.size()) {
      if (text::IsPronoun(toks[i].surface)) {
        candidates.push_back({{s, toks[i].char_start, toks[i].char_end}, toks[i].surface, false});
        ++i;
        continue;
      }
      std::size_t j = i;
      if (Honorifics().count(text::ToLower(toks[i].surface)) && i + 1 < toks.size()) {
        std::size_t k = i + 1;
        if (toks[k].surface == "." && k + 1 < toks.size()) ++k;
        if (IsNameToken(toks[k].surface, lowercase_words)) j = k;
      }
      if (IsNameToken(toks[j].surface, lowercase_words)) {
        std::size_t last = j;
        while (last + 1 < toks.size() && IsNameToken(toks[last + 1].surface, lowercase_words)) ++last;
        const std::size_t b = toks[i].char_start;
        const std::size_t e = toks[last].char_end;
        candidates.push_back({{s, b, e}, std::string(sentence.substr(b, e - b)), true});
        i = last + 1;
        continue;
      }
      ++i;
    }
  }

  struct Building {
    std::vector<CorefSpan> spans;
    bool has_masculine = false;
    bool has_feminine = false;
  };
  std::vector<Building> clusters;
  std::unordered_map<std::string, std::size_t> by_name;
  std::vector<std::vector<std::size_t>> names_in_sentence(tokens.size());
  std::unordered_map<int, std::size_t> pronoun_cluster;  // class -> cluster, pronoun-only

  auto compatible = [&](std::size_t c, PronounClass cls) {
    return cls == PronounClass::kMasculine ? !clusters[c].has_feminine : !clusters[c].has_masculine;
  };

  for (const auto& cand : candidates) {
    const std::size_t s = cand.span.sentence_index;
    if (cand.name) {
      auto [it, inserted] = by_name.emplace(cand.surface, clusters.size());
      if (inserted) clusters.emplace_back();
      clusters[it->second].spans.push_back(cand.span);
      auto& in_sentence = names_in_sentence[s];
      if (std::find(in_sentence.begin(), in_sentence.end(), it->second) == in_sentence.end()) {
        in_sentence.push_back(it->second);
      }
      continue;
    }

    const PronounClass cls = ClassOf(cand.surface);
    std::optional<std::size_t> target;
    const bool gendered = cls == PronounClass::kMasculine || cls == PronounClass::kFeminine;
    if (gendered) {
      for (std::size_t ss = s + 1; ss-- > 0 && !target;) {
        for (std::size_t c : names_in_sentence[ss]) {
          if (compatible(c, cls)) {
            target = c;
            break;
          }
        }
      }
      for (std::size_t ss = s + 1; ss-- > 0 && !target;) {
        if (!names_in_sentence[ss].empty()) target = names_in_sentence[ss].front();
      }
    }
    if (!target) {
      auto it = pronoun_cluster.find(static_cast<int>(cls));
      if (it != pronoun_cluster.end()) {
        target = it->second;
      } else {
        target = clusters.size();
        clusters.emplace_back();
        pronoun_cluster[static_cast<int>(cls)] = *target;
      }
    }
    auto& cluster = clusters[*target];
    cluster.spans.push_back(cand.span);
    if (cls == PronounClass::kMasculine) cluster.has_masculine = true;
    if (cls == PronounClass::kFeminine) cluster.has_feminine = true;
  }

  std::vector<std::vector<CorefSpan>> out;
  out.reserve(clusters.size());
  for (auto& c : clusters) out.push_back(std::move(c.spans));
  return out;
}

void ValidateClusters(const Story& story, const std::vector<MentionCluster>& clusters) {
  std::set<int> ids;
  for (const auto& c : clusters) {
    const std::string where = "story " + story.story_id + ", cluster " + std::to_string(c.cluster_id);
    if (!ids.insert(c.cluster_id).second) throw ValidationError(where + ": duplicate cluster id");
    if (c.mentions.empty()) throw ValidationError(where + ": empty cluster");
    for (std::size_t i = 0; i < c.mentions.size(); ++i) {
      const Mention& m = c.mentions[i];
      if (m.sentence_index >= story.sentences.size()) {
        throw ValidationError(where + ": mention outside the story");
      }
      const std::string& text = story.sentences[m.sentence_index].text;
      if (m.char_start >= m.char_end || m.char_end > text.size() ||
          text.compare(m.char_start, m.char_end - m.char_start, m.surface) != 0) {
        throw ValidationError(where + ": mention span does not match its sentence");
      }
      if ((m.kind == MentionKind::kPronoun) != text::IsPronoun(m.surface)) {
        throw ValidationError(where + ": mention kind inconsistent with surface '" + m.surface + "'");
      }
      if (i > 0) {
        const Mention& prev = c.mentions[i - 1];
        if (Position(prev) >= Position(m)) throw ValidationError(where + ": mentions not sorted");
        if (prev.sentence_index == m.sentence_index && prev.char_end > m.char_start) {
          throw ValidationError(where + ": overlapping mentions");
        }
      }
    }
  }
}

std::vector<MentionCluster> CorefAnnotate(const Story& story, CorefBackend& backend) {
  if (story.sentences.empty()) throw ValidationError("story " + story.story_id + " is empty");
  const CorefRequest request = MakeCorefRequest(story);
  std::vector<std::vector<CorefSpan>> raw;
  try {
    raw = backend.Resolve(request);
  } catch (const BackendError& e) {
    if (e.story_id().empty()) throw BackendError(e.what(), story.story_id, e.retriable());
    throw;
  } catch (const std::exception& e) {
    throw BackendError(std::string("coreference backend failed: ") + e.what(), story.story_id);
  }

  std::vector<MentionCluster> clusters;
  for (const auto& spans : raw) {
    if (spans.empty()) continue;
    MentionCluster c;
    for (const auto& sp : spans) {
      if (sp.sentence_index >= story.sentences.size()) {
        throw ValidationError("story " + story.story_id + ": backend span outside the story");
      }
      const std::string& text = story.sentences[sp.sentence_index].text;
      if (sp.char_start >= sp.char_end || sp.char_end > text.size()) {
        throw ValidationError("story " + story.story_id + ": backend span outside its sentence");
      }
      Mention m;
      m.sentence_index = sp.sentence_index;
      m.char_start = sp.char_start;
      m.char_end = sp.char_end;
      m.surface = text.substr(sp.char_start, sp.char_end - sp.char_start);
      m.kind = KindOf(m.surface);
      c.mentions.push_back(std::move(m));
    }
    std::sort(c.mentions.begin(), c.mentions.end(),
              [](const Mention& a, const Mention& b) { return Position(a) < Position(b); });
    clusters.push_back(std::move(c));
  }
  std::stable_sort(clusters.begin(), clusters.end(), [](const MentionCluster& a, const MentionCluster& b) {
    return Position(a.mentions.front()) < Position(b.mentions.front());
  });
  for (std::size_t i = 0; i < clusters.size(); ++i) clusters[i].cluster_id = static_cast<int>(i);
  ValidateClusters(story, clusters);
  return clusters;
}

int SelectProtagonist(const std::vector<MentionCluster>& clusters) {
  if (clusters.empty()) throw NoProtagonistError("no character clusters");
  const MentionCluster* best = nullptr;
  for (const auto& c : clusters) {
    if (c.mentions.empty()) continue;
    if (best == nullptr) {
      best = &c;
      continue;
    }
    const auto key = [](const MentionCluster& x) {
      return std::make_tuple(-static_cast<long long>(x.mentions.size()), x.mentions.front().sentence_index,
                             x.mentions.front().char_start, x.cluster_id);
    };
    if (key(c) < key(*best)) best = &c;
  }
  if (best == nullptr) throw NoProtagonistError("no character clusters");
  return best->cluster_id;
}

std::map<std::string, int> PronounCounts(const MentionCluster& cluster) {
  std::map<std::string, int> counts;
  for (const auto& m : cluster.mentions) {
    if (text::IsPronoun(m.surface)) ++counts[text::ToLower(m.surface)];
  }
  return counts;
}

Gender ResolveGender(const MentionCluster& cluster) {
  int masculine = 0;
  int feminine = 0;
  for (const auto& m : cluster.mentions) {
    const std::string lower = text::ToLower(m.surface);
    if (text::IsFirstPersonPronoun(lower)) return Gender::kUnresolved;
    if (lower == "he" || lower == "him" || lower == "his") ++masculine;
    if (lower == "she" || lower == "her" || lower == "hers") ++feminine;
  }
  if (masculine > feminine) return Gender::kMale;
  if (feminine > masculine) return Gender::kFemale;
  return Gender::kUnresolved;
}

AnonymizedStory Anonymize(const Story& story, const std::vector<MentionCluster>& clusters,
                          int protagonist, const SplitterOptions& options) {
  AnonymizedStory out;
  out.story_id = story.story_id;

  struct Placed {
    const Mention* mention;
    int cluster;
  };
  std::vector<Placed> all;
  for (const auto& c : clusters) {
    for (const auto& m : c.mentions) all.push_back({&m, c.cluster_id});
  }
  std::sort(all.begin(), all.end(), [](const Placed& a, const Placed& b) {
    return Position(*a.mention) < Position(*b.mention);
  });
  for (std::size_t i = 1; i < all.size(); ++i) {
    const Mention& prev = *all[i - 1].mention;
    const Mention& cur = *all[i].mention;
    if (prev.sentence_index == cur.sentence_index && prev.char_end > cur.char_start) {
      throw AnnotationConflictError("story " + story.story_id + ": mentions '" + prev.surface +
                                    "' and '" + cur.surface + "' overlap");
    }
  }

  if (clusters.empty()) {
    out.sentences = story.sentences;
    return out;
  }

  std::vector<const MentionCluster*> others;
  bool found = false;
  for (const auto& c : clusters) {
    if (c.cluster_id == protagonist) {
      found = true;
    } else if (!c.mentions.empty()) {
      others.push_back(&c);
    }
  }
  if (!found) {
    throw ValidationError("story " + story.story_id + ": protagonist cluster " +
                          std::to_string(protagonist) + " not among clusters");
  }
  std::stable_sort(others.begin(), others.end(), [](const MentionCluster* a, const MentionCluster* b) {
    return Position(a->mentions.front()) < Position(b->mentions.front());
  });
  out.placeholder_map[protagonist] = "PersonX";
  for (std::size_t i = 0; i < others.size(); ++i) {
    out.placeholder_map[others[i]->cluster_id] = PlaceholderFor(i + 1);
  }

  std::size_t next = 0;
  for (const auto& sentence : story.sentences) {
    std::string rewritten;
    std::size_t cursor = 0;
    while (next < all.size() && all[next].mention->sentence_index == sentence.index) {
      const Mention& m = *all[next].mention;
      rewritten.append(sentence.text, cursor, m.char_start - cursor);
      rewritten += out.placeholder_map.at(all[next].cluster);
      if (IsReplacementPossessive(m, sentence)) rewritten += "'s";
      cursor = m.char_end;
      ++next;
    }
    rewritten.append(sentence.text, cursor, std::string::npos);
    Sentence s;
    s.index = sentence.index;
    s.tokens = Tokenize(rewritten, options);
    s.text = std::move(rewritten);
    out.sentences.push_back(std::move(s));
  }
  return out;
}

std::vector<Role> AssignSentenceRoles(const Story& story, const std::vector<MentionCluster>& clusters,
                                      int protagonist) {
  std::vector<Role> roles(story.sentences.size(), Role::kNoAgent);
  std::vector<std::optional<std::pair<std::size_t, int>>> earliest(story.sentences.size());
  for (const auto& c : clusters) {
    for (const auto& m : c.mentions) {
      if (m.sentence_index >= roles.size()) continue;
      auto& slot = earliest[m.sentence_index];
      if (!slot || m.char_start < slot->first) slot = std::make_pair(m.char_start, c.cluster_id);
    }
  }
  for (std::size_t i = 0; i < roles.size(); ++i) {
    if (earliest[i]) {
      roles[i] = earliest[i]->second == protagonist ? Role::kProtagonistAgent : Role::kOtherAgent;
    }
  }
  return roles;
}

std::vector<std::string> FindLeakedSurfaces(const AnonymizedStory& anonymized,
                                            const std::vector<MentionCluster>& clusters) {
  std::set<std::vector<std::string>> targets;
  for (const auto& c : clusters) {
    for (const auto& m : c.mentions) {
      if (m.kind == MentionKind::kName) {
        std::vector<std::string> seq;
        for (const auto& t : Tokenize(m.surface)) seq.push_back(text::ToLower(t.surface));
        if (!seq.empty()) targets.insert(seq);
      } else if (text::IsMasculinePronoun(m.surface) || text::IsFemininePronoun(m.surface)) {
        targets.insert({text::ToLower(m.surface)});
      }
    }
  }
  std::vector<std::string> leaked;
  for (const auto& s : anonymized.sentences) {
    std::vector<std::string> lower;
    for (const auto& t : s.tokens) lower.push_back(text::ToLower(t.surface));
    for (const auto& seq : targets) {
      if (seq.size() > lower.size()) continue;
      for (std::size_t i = 0; i + seq.size() <= lower.size(); ++i) {
        if (std::equal(seq.begin(), seq.end(), lower.begin() + static_cast<std::ptrdiff_t>(i))) {
          std::string joined;
          for (const auto& w : seq) joined += (joined.empty() ? "" : " ") + w;
          leaked.push_back(joined);
        }
      }
    }
  }
  return leaked;
}

AnnotatedStory AnnotateStory(const Story& story, CorefBackend& backend, const SplitterOptions& options) {
  AnnotatedStory out;
  out.clusters = CorefAnnotate(story, backend);
  auto& ann = out.annotation;
  ann.story_id = story.story_id;
  if (out.clusters.empty()) {
    ann.sentence_roles.assign(story.sentences.size(), Role::kNoAgent);
    out.anonymized = Anonymize(story, out.clusters, -1, options);
    return out;
  }
  ann.protagonist_cluster = SelectProtagonist(out.clusters);
  const MentionCluster& prot = out.clusters.at(static_cast<std::size_t>(ann.protagonist_cluster));
  ann.gender = ResolveGender(prot);
  ann.pronoun_counts = PronounCounts(prot);
  ann.sentence_roles = AssignSentenceRoles(story, out.clusters, ann.protagonist_cluster);
  out.anonymized = Anonymize(story, out.clusters, ann.protagonist_cluster, options);
  return out;
}

}  // namespace protaudit
