#include "protaudit/corpus.hpp"

#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unordered_set>

#include "protaudit/csv.hpp"
#include "protaudit/error.hpp"
#include "protaudit/text.hpp"

namespace protaudit {
namespace {

using nlohmann::json;

bool IsClosing(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }
bool IsTerminator(char c) { return c == '.' || c == '!' || c == '?'; }

// Lowercased whitespace-delimited word ending at `end` (exclusive), with
// leading punctuation stripped.
std::string WordBefore(std::string_view text, std::size_t end) {
  std::size_t begin = end;
  while (begin > 0 && !text::IsSpace(text[begin - 1])) --begin;
  while (begin < end && text::IsPunct(text[begin]) && text[begin] != '.') ++begin;
  return text::ToLower(text.substr(begin, end - begin));
}

}  // namespace

std::string_view ToString(Source s) { return s == Source::kGenerated ? "GENERATED" : "HUMAN"; }

std::optional<Source> ParseSource(std::string_view s) {
  const std::string lower = text::ToLower(s);
  if (lower == "generated") return Source::kGenerated;
  if (lower == "human") return Source::kHuman;
  return std::nullopt;
}

std::optional<CorpusFormat> ParseCorpusFormat(std::string_view s) {
  const std::string lower = text::ToLower(s);
  if (lower == "jsonl") return CorpusFormat::kJsonl;
  if (lower == "csv" || lower == "csv_title_story") return CorpusFormat::kCsvTitleStory;
  return std::nullopt;
}

std::string Story::Text() const {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out.push_back(' ');
    out += s.text;
  }
  return out;
}

const Story* Corpus::Find(std::string_view story_id) const {
  for (const auto& s : stories) {
    if (s.story_id == story_id) return &s;
  }
  return nullptr;
}

std::vector<std::string> SplitSentences(std::string_view text, const SplitterOptions& options) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    auto piece = text::Trim(text.substr(start, end - start));
    if (!piece.empty()) out.emplace_back(piece);
    start = end;
  };
  std::size_t i = 0;
  while (i < text.size()) {
    if (!IsTerminator(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && IsTerminator(text[j])) ++j;
    const std::size_t run_end = j;
    while (j < text.size() && IsClosing(text[j])) ++j;
    const bool at_boundary = j == text.size() || text::IsSpace(text[j]);
    bool abbreviation = false;
    if (at_boundary && run_end == i + 1 && text[i] == '.') {
      abbreviation = options.abbreviations.count(WordBefore(text, i + 1)) > 0;
    }
    if (at_boundary && !abbreviation) emit(j);
    i = j;
  }
  emit(text.size());
  return out;
}

std::vector<Token> Tokenize(std::string_view sentence, const SplitterOptions& options) {
  std::vector<Token> tokens;
  auto push = [&](std::size_t b, std::size_t e) {
    tokens.push_back(Token{std::string(sentence.substr(b, e - b)), b, e});
  };
  std::size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size() && text::IsSpace(sentence[i])) ++i;
    std::size_t end = i;
    while (end < sentence.size() && !text::IsSpace(sentence[end])) ++end;
    if (end == i) break;

    std::size_t b = i;
    std::size_t e = end;
    while (b < e && text::IsPunct(sentence[b])) {
      push(b, b + 1);
      ++b;
    }
    std::vector<std::pair<std::size_t, std::size_t>> trailing;
    if (b < e && options.abbreviations.count(text::ToLower(sentence.substr(b, e - b))) == 0) {
      while (e > b && text::IsPunct(sentence[e - 1])) {
        trailing.emplace_back(e - 1, e);
        --e;
      }
      if (e - b > 2 && sentence[e - 2] == '\'' && (sentence[e - 1] == 's' || sentence[e - 1] == 'S')) {
        trailing.emplace_back(e - 2, e);
        e -= 2;
      }
    }
    if (e > b) push(b, e);
    for (auto it = trailing.rbegin(); it != trailing.rend(); ++it) push(it->first, it->second);
    i = end;
  }
  return tokens;
}

void ValidateStory(const Story& story) {
  if (story.sentences.empty()) {
    throw ValidationError("story " + story.story_id + " has no sentences");
  }
  std::size_t total = 0;
  for (std::size_t i = 0; i < story.sentences.size(); ++i) {
    const Sentence& s = story.sentences[i];
    if (s.index != i) {
      throw ValidationError("story " + story.story_id + ": sentence index out of order");
    }
    if (s.tokens.empty()) {
      throw ValidationError("story " + story.story_id + ": sentence " + std::to_string(i) +
                            " has no tokens");
    }
    std::size_t prev_end = 0;
    for (const Token& t : s.tokens) {
      if (t.char_start < prev_end || t.char_end <= t.char_start || t.char_end > s.text.size() ||
          s.text.compare(t.char_start, t.char_end - t.char_start, t.surface) != 0) {
        throw ValidationError("story " + story.story_id + ": bad token span in sentence " +
                              std::to_string(i));
      }
      prev_end = t.char_end;
    }
    total += s.tokens.size();
  }
  if (total != story.token_count) {
    throw ValidationError("story " + story.story_id + ": token_count mismatch");
  }
}

Story MakeStory(std::string story_id, std::string title, std::string_view text, Source source,
                const SplitterOptions& options) {
  if (story_id.empty()) throw ValidationError("empty story id");
  Story story;
  story.story_id = std::move(story_id);
  story.title = std::move(title);
  story.source = source;
  for (auto& piece : SplitSentences(text, options)) {
    Sentence s;
    s.index = story.sentences.size();
    s.tokens = Tokenize(piece, options);
    s.text = std::move(piece);
    story.token_count += s.tokens.size();
    story.sentences.push_back(std::move(s));
  }
  if (story.sentences.empty()) {
    throw ValidationError("story " + story.story_id + " has empty text");
  }
  ValidateStory(story);
  return story;
}

namespace {

Story StoryFromFields(const std::string& file, std::size_t line, const std::string& id,
                      const std::string& title, const std::string& text,
                      const std::string& source, const SplitterOptions& splitter) {
  if (id.empty()) throw ParseError(file, line, "empty id");
  if (text::Trim(text).empty()) throw ParseError(file, line, "empty text for story " + id);
  auto src = ParseSource(source);
  if (!src) throw ParseError(file, line, "unknown source '" + source + "'");
  try {
    return MakeStory(id, title, text, *src, splitter);
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(file, line, e.what());
  }
}

std::string RequireString(const json& obj, const char* key, const std::string& file,
                          std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(file, line, std::string("missing key '") + key + "'");
  if (!it->is_string()) throw ParseError(file, line, std::string("key '") + key + "' is not a string");
  return it->get<std::string>();
}

std::vector<std::pair<std::size_t, Story>> LoadJsonl(const std::string& file,
                                                     const SplitterOptions& splitter) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open corpus file: " + file);
  std::vector<std::pair<std::size_t, Story>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::Trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(file, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(file, line_no, "record is not a JSON object");
    out.emplace_back(line_no, StoryFromFields(file, line_no, RequireString(obj, "id", file, line_no),
                                              RequireString(obj, "title", file, line_no),
                                              RequireString(obj, "text", file, line_no),
                                              RequireString(obj, "source", file, line_no),
                                              splitter));
  }
  return out;
}

std::vector<std::pair<std::size_t, Story>> LoadCsv(const std::string& file,
                                                   const SplitterOptions& splitter) {
  const auto records = csv::Parse(text::ReadFile(file), file);
  std::vector<std::pair<std::size_t, Story>> out;
  if (records.empty()) return out;
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < records[0].fields.size(); ++i) {
    column[text::ToLower(text::Trim(records[0].fields[i]))] = i;
  }
  for (const char* key : {"id", "title", "text", "source"}) {
    if (!column.count(key)) {
      throw ParseError(file, records[0].line, std::string("header lacks column '") + key + "'");
    }
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != records[0].fields.size()) {
      throw ParseError(file, rec.line,
                       "expected " + std::to_string(records[0].fields.size()) + " fields, got " +
                           std::to_string(rec.fields.size()));
    }
    auto f = [&](const char* key) { return rec.fields[column.at(key)]; };
    out.emplace_back(rec.line,
                     StoryFromFields(file, rec.line, f("id"), f("title"), f("text"), f("source"), splitter));
  }
  return out;
}

}  // namespace

Corpus LoadCorpus(const std::filesystem::path& path, CorpusFormat format, const LoadOptions& options) {
  const std::string file = path.string();
  if (!std::filesystem::exists(path)) throw ValidationError("corpus file does not exist: " + file);
  auto loaded = format == CorpusFormat::kJsonl ? LoadJsonl(file, options.splitter)
                                               : LoadCsv(file, options.splitter);
  if (loaded.empty()) throw EmptyCorpusError("corpus file has no records: " + file);

  Corpus corpus;
  corpus.name = options.name.value_or(path.stem().string());
  corpus.provenance = path.filename().string() +
                      (format == CorpusFormat::kJsonl ? " (jsonl)" : " (csv)");
  std::map<std::string, std::size_t> seen;
  for (auto& [line, story] : loaded) {
    auto [it, inserted] = seen.emplace(story.story_id, line);
    if (!inserted) {
      throw DuplicateIdError(file + ":" + std::to_string(line) + ": duplicate story id '" +
                             story.story_id + "' (first seen on line " +
                             std::to_string(it->second) + ")");
    }
    corpus.stories.push_back(std::move(story));
  }
  return corpus;
}

void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write corpus file: " + path.string());
  for (const auto& s : corpus.stories) {
    nlohmann::ordered_json obj;
    obj["id"] = s.story_id;
    obj["title"] = s.title;
    obj["text"] = s.Text();
    obj["source"] = ToString(s.source);
    out << obj.dump() << '\n';
  }
}

StatsSummary CorpusStats(const Corpus& corpus, std::span<const ProtagonistAnnotation> annotations) {
  StatsSummary stats;
  stats.story_count = corpus.stories.size();
  std::map<std::string_view, const Story*> by_id;
  std::size_t total_tokens = 0;
  for (const auto& s : corpus.stories) {
    by_id[s.story_id] = &s;
    total_tokens += s.token_count;
  }
  if (stats.story_count > 0) {
    stats.mean_tokens = static_cast<double>(total_tokens) / static_cast<double>(stats.story_count);
  }
  std::unordered_set<std::string_view> annotated;
  std::size_t tokens_f = 0;
  std::size_t tokens_m = 0;
  for (const auto& a : annotations) {
    auto it = by_id.find(a.story_id);
    if (it == by_id.end()) throw ValidationError("annotation references unknown story '" + a.story_id + "'");
    if (!annotated.insert(a.story_id).second) {
      throw ValidationError("story '" + a.story_id + "' is annotated more than once");
    }
    switch (a.gender) {
      case Gender::kFemale:
        ++stats.female;
        tokens_f += it->second->token_count;
        break;
      case Gender::kMale:
        ++stats.male;
        tokens_m += it->second->token_count;
        break;
      case Gender::kUnresolved:
        ++stats.unresolved;
        break;
    }
  }
  stats.annotated_count = annotated.size();
  if (stats.female > 0) stats.mean_tokens_female = static_cast<double>(tokens_f) / stats.female;
  if (stats.male > 0) stats.mean_tokens_male = static_cast<double>(tokens_m) / stats.male;
  return stats;
}

}  // namespace protaudit
