#include "phenollm/claims.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace phenollm {

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Crude singularizer, applied to both column vocab and reply tokens so the
// two sides stay comparable.
std::string singular(std::string w) {
  if (w.size() > 3 && w.back() == 's' && w[w.size() - 2] != 's') w.pop_back();
  return w;
}

struct Token {
  std::string text;  // lowercased
  std::size_t begin = 0;
  std::size_t end = 0;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_char(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_word_char(text[j])) ++j;
    tokens.push_back({lower(text.substr(i, j - i)), i, j});
    i = j;
  }
  return tokens;
}

// ----- sentence segmentation -----

const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> set = {
      "vs", "e.g", "eg", "i.e", "ie", "etc", "approx", "dr", "mr", "ms", "st"};
  return set;
}

std::vector<std::pair<std::size_t, std::size_t>> split_sentences(
    const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    std::size_t b = start, e = end;
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    if (e > b) spans.emplace_back(b, e);
    start = end;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      flush(i);
      start = i + 1;
      continue;
    }
    if (c != '.' && c != '!' && c != '?') continue;
    if (c == '.') {
      // decimals, "e.g.", trailing abbreviation
      const bool digit_both = i > 0 && i + 1 < text.size() &&
                              std::isdigit(static_cast<unsigned char>(text[i - 1])) &&
                              std::isdigit(static_cast<unsigned char>(text[i + 1]));
      if (digit_both) continue;
      std::size_t w = i;
      while (w > start && (is_word_char(text[w - 1]) || text[w - 1] == '.')) --w;
      std::string prev = lower(text.substr(w, i - w));
      if (abbreviations().count(prev)) continue;
    }
    std::size_t next = i + 1;
    while (next < text.size() && text[next] == ' ') ++next;
    if (next == text.size() || next == i + 1) {
      if (next == text.size()) flush(i + 1);
      continue;  // "e.g.," or end handled; no space => not a boundary
    }
    const char nc = text[next];
    if (std::isupper(static_cast<unsigned char>(nc)) || nc == '"' || nc == '(') {
      flush(i + 1);
      start = i + 1;
    }
  }
  flush(text.size());
  return spans;
}

// ----- date mentions -----

const std::map<std::string, unsigned>& month_names() {
  static const std::map<std::string, unsigned> m = {
      {"january", 1}, {"jan", 1},   {"february", 2}, {"feb", 2},
      {"march", 3},   {"mar", 3},   {"april", 4},    {"apr", 4},
      {"may", 5},     {"june", 6},  {"jun", 6},      {"july", 7},
      {"jul", 7},     {"august", 8},{"aug", 8},      {"september", 9},
      {"sept", 9},    {"sep", 9},   {"october", 10}, {"oct", 10},
      {"november", 11},{"nov", 11}, {"december", 12},{"dec", 12}};
  return m;
}

struct DateMention {
  DateRef ref;
  std::size_t begin = 0;
  std::size_t end = 0;
};

bool parse_uint(const std::string& s, unsigned& out) {
  if (s.empty() || s.size() > 4) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  out = static_cast<unsigned>(std::stoul(s));
  return true;
}

bool is_ordinal_suffix(const std::string& s) {
  return s == "st" || s == "nd" || s == "rd" || s == "th";
}

std::vector<DateMention> find_dates(const std::string& text,
                                    const std::vector<Token>& tokens) {
  std::vector<DateMention> out;
  std::vector<bool> used(tokens.size(), false);

  // ISO yyyy-mm-dd
  for (std::size_t i = 0; i + 2 < tokens.size(); ++i) {
    const Token& y = tokens[i];
    const Token& m = tokens[i + 1];
    const Token& d = tokens[i + 2];
    if (y.text.size() != 4 || m.text.size() != 2 || d.text.size() != 2) continue;
    if (y.end >= text.size() || text[y.end] != '-' || text[m.end] != '-') continue;
    if (m.begin != y.end + 1 || d.begin != m.end + 1) continue;
    unsigned yy, mm, dd;
    if (!parse_uint(y.text, yy) || !parse_uint(m.text, mm) || !parse_uint(d.text, dd))
      continue;
    if (mm < 1 || mm > 12 || dd < 1 || dd > 31) continue;
    DateMention mention;
    mention.ref = {static_cast<int>(yy), mm, dd, text.substr(y.begin, d.end - y.begin)};
    mention.begin = y.begin;
    mention.end = d.end;
    out.push_back(mention);
    used[i] = used[i + 1] = used[i + 2] = true;
  }

  auto month_of = [&](std::size_t i) -> unsigned {
    if (used[i]) return 0;
    // months must be capitalized in prose; bare "may" is a verb
    if (!std::isupper(static_cast<unsigned char>(text[tokens[i].begin]))) return 0;
    auto it = month_names().find(tokens[i].text);
    return it == month_names().end() ? 0 : it->second;
  };

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    // "May 9" / "May 9th, 2019"
    if (unsigned mm = month_of(i); mm != 0 && i + 1 < tokens.size()) {
      unsigned dd;
      if (used[i + 1] || !parse_uint(tokens[i + 1].text, dd) || dd < 1 || dd > 31)
        continue;
      std::size_t last = i + 1;
      if (last + 1 < tokens.size() && is_ordinal_suffix(tokens[last + 1].text) &&
          tokens[last + 1].begin == tokens[last].end) {
        last += 1;
      }
      std::optional<int> year;
      if (last + 1 < tokens.size() && tokens[last + 1].text.size() == 4) {
        unsigned yy;
        if (parse_uint(tokens[last + 1].text, yy) && yy >= 1900 && yy <= 2100) {
          year = static_cast<int>(yy);
          last += 1;
        }
      }
      DateMention mention;
      mention.ref = {year, mm, dd,
                     text.substr(tokens[i].begin, tokens[last].end - tokens[i].begin)};
      mention.begin = tokens[i].begin;
      mention.end = tokens[last].end;
      out.push_back(mention);
      for (std::size_t k = i; k <= last; ++k) used[k] = true;
      continue;
    }
    // "9 May"
    unsigned dd;
    if (!used[i] && parse_uint(tokens[i].text, dd) && dd >= 1 && dd <= 31 &&
        i + 1 < tokens.size()) {
      if (unsigned mm = month_of(i + 1); mm != 0) {
        DateMention mention;
        mention.ref = {std::nullopt, mm, dd,
                       text.substr(tokens[i].begin,
                                   tokens[i + 1].end - tokens[i].begin)};
        mention.begin = tokens[i].begin;
        mention.end = tokens[i + 1].end;
        out.push_back(mention);
        used[i] = used[i + 1] = true;
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const DateMention& a, const DateMention& b) { return a.begin < b.begin; });
  return out;
}

bool inside_any(std::size_t begin, std::size_t end,
                const std::vector<DateMention>& dates) {
  for (const auto& d : dates) {
    if (begin < d.end && d.begin < end) return true;
  }
  return false;
}

// ----- number mentions -----

struct NumberMention {
  double value = 0.0;
  int decimals = 0;
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t token_index = 0;  // index of first token at/after begin
};

const std::unordered_set<std::string>& calendar_units() {
  static const std::unordered_set<std::string> set = {
      "day", "days", "week", "weeks", "month", "months", "year", "years"};
  return set;
}

std::string canonical_unit(const std::string& token);

std::vector<NumberMention> find_numbers(const std::string& text,
                                        const std::string& full,
                                        std::size_t offset,
                                        const std::vector<DateMention>& dates,
                                        const std::vector<Token>& tokens) {
  std::vector<NumberMention> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    // attached to a word or identifier: PHQ-4, v2, score3
    if (i > 0) {
      const char prev = text[i - 1];
      const bool hyphen_id = prev == '-' && i >= 2 &&
                             std::isalpha(static_cast<unsigned char>(text[i - 2]));
      if (is_word_char(prev) || prev == '.' || hyphen_id) {
        while (i < text.size() && (is_word_char(text[i]) || text[i] == '.')) ++i;
        continue;
      }
    }
    std::size_t j = i;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    // thousands groups: comma followed by exactly three digits
    while (j + 3 < text.size() + 1 && j < text.size() && text[j] == ',') {
      std::size_t k = j + 1, digits = 0;
      while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
        ++k;
        ++digits;
      }
      if (digits == 3) {
        j = k;
      } else {
        break;
      }
    }
    int decimals = 0;
    if (j + 1 < text.size() && text[j] == '.' &&
        std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
      std::size_t k = j + 1;
      while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
      decimals = static_cast<int>(k - j - 1);
      j = k;
    }

    const std::size_t begin = i;
    const std::size_t end = j;
    i = j;

    if (inside_any(begin, end, dates)) continue;
    // percentage
    std::size_t after = end;
    while (after < text.size() && text[after] == ' ') ++after;
    if (after < text.size() && text[after] == '%') continue;
    // list ordinal: only whitespace before it on its own line, "1." or "1)"
    {
      const std::size_t abs_begin = offset + begin;
      std::size_t line_start = full.rfind('\n', abs_begin == 0 ? 0 : abs_begin - 1);
      line_start = line_start == std::string::npos ? 0 : line_start + 1;
      bool only_ws = true;
      for (std::size_t k = line_start; k < abs_begin; ++k) {
        if (!std::isspace(static_cast<unsigned char>(full[k])) && full[k] != '-' &&
            full[k] != '*') {
          only_ws = false;
          break;
        }
      }
      if (only_ws && end < text.size() && (text[end] == '.' || text[end] == ')'))
        continue;
    }
    // "(1)" enumeration
    if (begin > 0 && text[begin - 1] == '(' && end < text.size() &&
        text[end] == ')' && end - begin <= 2 && decimals == 0) {
      continue;
    }

    std::string raw = text.substr(begin, end - begin);
    std::string digits_only;
    for (char c : raw) {
      if (c != ',') digits_only += c;
    }
    NumberMention m;
    m.value = std::strtod(digits_only.c_str(), nullptr);
    m.decimals = decimals;
    m.text = raw;
    m.begin = begin;
    m.end = end;
    std::size_t ti = 0;
    while (ti < tokens.size() && tokens[ti].end <= begin) ++ti;
    m.token_index = ti;

    // calendar counts ("28 days") and bare years are structure, not data
    std::size_t nt = m.token_index;
    while (nt < tokens.size() && tokens[nt].begin < end) ++nt;
    const std::string next_tok = nt < tokens.size() ? tokens[nt].text : "";
    if (calendar_units().count(next_tok)) continue;
    // A unit word right after rules out a year mention ("2044 steps").
    const bool year_like = decimals == 0 && raw.size() == 4 &&
                           m.value >= 1900 && m.value <= 2100 &&
                           canonical_unit(next_tok).empty();
    if (year_like) continue;

    out.push_back(std::move(m));
  }
  return out;
}

// ----- unit hints -----

std::string canonical_unit(const std::string& token) {
  static const std::unordered_map<std::string, std::string> units = {
      {"minute", "minutes"}, {"minutes", "minutes"}, {"min", "minutes"},
      {"mins", "minutes"},   {"hour", "hours"},      {"hours", "hours"},
      {"hr", "hours"},       {"hrs", "hours"},       {"meter", "meters"},
      {"meters", "meters"},  {"metre", "meters"},    {"metres", "meters"},
      {"kilometer", "kilometers"}, {"kilometers", "kilometers"},
      {"kilometre", "kilometers"}, {"kilometres", "kilometers"},
      {"km", "kilometers"},  {"step", "steps"},      {"steps", "steps"},
      {"device", "devices"}, {"devices", "devices"}, {"episode", "episodes"},
      {"episodes", "episodes"}};
  auto it = units.find(token);
  return it == units.end() ? std::string() : it->second;
}

std::string unit_hint_after(const std::vector<Token>& tokens, std::size_t from,
                            std::size_t limit) {
  for (std::size_t k = from; k < tokens.size() && k < from + limit; ++k) {
    std::string u = canonical_unit(tokens[k].text);
    if (!u.empty()) return u;
  }
  return "";
}

// ----- column matching -----

const std::unordered_set<std::string>& vocab_stopwords() {
  static const std::unordered_set<std::string> set = {
      "the", "of", "a", "an", "and", "or", "in", "at", "on", "by",
      "for", "with", "per", "spent", "while", "discovered", "nearby"};
  return set;
}

class ColumnMatcher {
 public:
  explicit ColumnMatcher(const FeatureSchema& schema) : schema_(schema) {
    std::map<std::string, int> df;
    vocab_.resize(schema.size());
    for (std::size_t c = 0; c < schema.size(); ++c) {
      std::set<std::string> words;
      for (const Token& t : tokenize(schema.column(c).display_name)) {
        const std::string w = singular(t.text);
        if (!vocab_stopwords().count(w)) words.insert(w);
      }
      for (const std::string& alias : schema.column(c).aliases) {
        words.insert(singular(lower(alias)));
      }
      for (const auto& w : words) df[w] += 1;
      vocab_[c] = std::move(words);
    }
    for (const auto& [word, count] : df) {
      weight_[word] = 1.0 / static_cast<double>(count);
    }
  }

  struct Scored {
    std::optional<std::size_t> column;
    double best = 0.0;
    double second = 0.0;
  };

  Scored score(const std::vector<std::string>& words,
               const std::string& unit_hint) const {
    Scored result;
    std::size_t best_col = 0;
    std::vector<double> scores(schema_.size(), 0.0);
    std::set<std::string> unique(words.begin(), words.end());
    for (std::size_t c = 0; c < schema_.size(); ++c) {
      double s = 0.0;
      for (const auto& w : unique) {
        if (vocab_[c].count(w)) s += weight_.at(w);
      }
      if (s > 0.0 && unit_compatible(unit_hint, schema_.column(c).unit)) s += 0.75;
      scores[c] = s;
      if (s > result.best) {
        result.second = result.best;
        result.best = s;
        best_col = c;
      } else if (s > result.second) {
        result.second = s;
      }
    }
    if (result.best >= 0.8 && result.best - result.second >= 0.25) {
      result.column = best_col;
    }
    return result;
  }

  static bool unit_compatible(const std::string& hint, const std::string& col_unit) {
    if (hint.empty() || col_unit.empty()) return false;
    if ((hint == "minutes" || hint == "hours") && col_unit == "minutes") return true;
    if ((hint == "meters" || hint == "kilometers") && col_unit == "meters")
      return true;
    return false;
  }

 private:
  const FeatureSchema& schema_;
  std::vector<std::set<std::string>> vocab_;
  std::map<std::string, double> weight_;
};

std::vector<std::string> words_of(const std::vector<Token>& tokens,
                                  std::size_t from, std::size_t to) {
  std::vector<std::string> out;
  for (std::size_t k = from; k < to && k < tokens.size(); ++k) {
    out.push_back(singular(tokens[k].text));
  }
  return out;
}

// ----- cue lexicons -----

enum class Cue { None, Max, Min };

Cue superlative(const std::string& w) {
  static const std::unordered_set<std::string> maxes = {
      "highest", "largest", "greatest", "peak", "maximum", "max", "longest"};
  static const std::unordered_set<std::string> mins = {
      "lowest", "smallest", "fewest", "minimum", "min", "shortest"};
  if (maxes.count(w)) return Cue::Max;
  if (mins.count(w)) return Cue::Min;
  return Cue::None;
}

bool aggregate_mean_cue(const std::string& w) {
  static const std::unordered_set<std::string> set = {"average", "averaged",
                                                      "averaging", "mean"};
  return set.count(w) > 0;
}

bool hedge_word(const std::string& w) {
  static const std::unordered_set<std::string> set = {
      "might", "may", "could", "would", "can", "possibly", "perhaps",
      "likely", "if", "hypothetically"};
  return set.count(w) > 0;
}

int trend_cue(const std::string& w, TrendKind& kind) {
  static const std::unordered_set<std::string> inc = {
      "increase", "increased", "increases", "increasing", "rose", "rising",
      "grew", "growing", "climbed", "climbing", "upward", "uptick"};
  static const std::unordered_set<std::string> dec = {
      "decrease", "decreased", "decreases", "decreasing", "declined",
      "declining", "decline", "dropped", "fell", "falling", "downward",
      "reduction", "shrank"};
  static const std::unordered_set<std::string> high = {
      "fluctuate", "fluctuates", "fluctuated", "fluctuating", "fluctuation",
      "fluctuations", "inconsistency", "inconsistent", "varies", "vary",
      "varied", "variance", "variances", "variability", "irregular",
      "erratic", "unstable"};
  static const std::unordered_set<std::string> low = {
      "consistent", "stable", "steady", "uniform", "unchanged"};
  if (inc.count(w)) { kind = TrendKind::Increase; return 1; }
  if (dec.count(w)) { kind = TrendKind::Decrease; return 1; }
  if (high.count(w)) { kind = TrendKind::HighVariability; return 1; }
  if (low.count(w)) { kind = TrendKind::LowVariability; return 1; }
  return 0;
}

TrendScope scope_of(const std::vector<Token>& tokens) {
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (tokens[i + 1].text != "half") continue;
    if (tokens[i].text == "first") return TrendScope::FirstHalf;
    if (tokens[i].text == "second" || tokens[i].text == "latter" ||
        tokens[i].text == "last") {
      return TrendScope::SecondHalf;
    }
  }
  return TrendScope::WholeWindow;
}

}  // namespace

const char* decision_name(Decision d) {
  switch (d) {
    case Decision::Yes: return "yes";
    case Decision::No: return "no";
    case Decision::Unparseable: return "unparseable";
  }
  return "unknown";
}

Classification extract_classification(const std::string& reply) {
  const std::vector<Token> tokens = tokenize(reply);

  auto yes_no_at = [&](std::size_t i) -> std::optional<Decision> {
    if (tokens[i].text == "yes") return Decision::Yes;
    if (tokens[i].text == "no") return Decision::No;
    return std::nullopt;
  };

  // Strong cues: "best guess ...: Yes" / "answer: No"; the last one wins.
  std::optional<Decision> strong;
  std::string strong_evidence;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    bool cue = false;
    std::size_t cue_end = i;
    if (i + 1 < tokens.size() && tokens[i].text == "best" &&
        tokens[i + 1].text == "guess") {
      cue = true;
      cue_end = i + 1;
    } else if (tokens[i].text == "answer" || tokens[i].text == "conclusion" ||
               tokens[i].text == "verdict") {
      cue = true;
    }
    if (!cue) continue;
    for (std::size_t k = cue_end + 1; k < tokens.size() && k <= cue_end + 12; ++k) {
      if (auto d = yes_no_at(k)) {
        strong = d;
        strong_evidence = reply.substr(
            tokens[i].begin, tokens[k].end - tokens[i].begin);
        break;
      }
    }
  }
  if (strong) return {*strong, strong_evidence};

  // Weak cue: a sentence that is just "Yes"/"No" (quotes and punctuation
  // aside). Accepted only when unambiguous.
  std::optional<Decision> weak;
  std::string weak_evidence;
  for (const auto& [b, e] : split_sentences(reply)) {
    std::string word;
    bool clean = true;
    for (std::size_t k = b; k < e; ++k) {
      const char c = reply[k];
      if (is_word_char(c)) {
        word += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      } else if (c != '"' && c != '\'' && c != '.' && c != '!' && c != ',' &&
                 c != '*' && c != ' ') {
        clean = false;
        break;
      }
    }
    if (!clean) continue;
    if (word != "yes" && word != "no") continue;
    const Decision d = word == "yes" ? Decision::Yes : Decision::No;
    if (weak && *weak != d) return {Decision::Unparseable, ""};
    weak = d;
    weak_evidence = reply.substr(b, e - b);
  }
  if (weak) return {*weak, weak_evidence};
  return {Decision::Unparseable, ""};
}

ExtractedClaims extract_claims(const std::string& reply,
                               const FeatureSchema& schema) {
  ExtractedClaims claims;
  const ColumnMatcher matcher(schema);

  for (const auto& [sb, se] : split_sentences(reply)) {
    const std::string sentence = reply.substr(sb, se - sb);
    const std::vector<Token> tokens = tokenize(sentence);
    if (tokens.empty()) continue;
    const std::vector<DateMention> dates = find_dates(sentence, tokens);
    const std::vector<NumberMention> numbers =
        find_numbers(sentence, reply, sb, dates, tokens);

    // tokens outside date mentions, for column matching
    std::vector<std::string> sentence_words;
    for (const Token& t : tokens) {
      if (!inside_any(t.begin, t.end, dates)) {
        sentence_words.push_back(singular(t.text));
      }
    }

    auto nearest_date = [&](std::size_t pos) -> std::optional<DateRef> {
      const DateMention* before = nullptr;
      for (const auto& d : dates) {
        if (d.begin >= pos) return d.ref;
        before = &d;
      }
      if (before) return before->ref;
      return std::nullopt;
    };

    // ----- numeric claims -----
    std::vector<std::pair<std::size_t, ExtremumDir>> extremum_claim_cols;
    for (std::size_t ni = 0; ni < numbers.size(); ++ni) {
      const NumberMention& num = numbers[ni];
      NumericClaim claim;
      claim.value = num.value;
      claim.cited_decimals = num.decimals;
      claim.value_text = num.text;
      claim.sentence = sentence;
      claim.date = nearest_date(num.end);

      const std::size_t next_num_tok = ni + 1 < numbers.size()
                                           ? numbers[ni + 1].token_index
                                           : tokens.size();
      claim.unit_hint = unit_hint_after(
          tokens, num.token_index, std::min<std::size_t>(3, tokens.size()));

      // kind cues look a few tokens back
      const std::size_t back_from =
          num.token_index >= 8 ? num.token_index - 8 : 0;
      for (std::size_t k = back_from; k < num.token_index; ++k) {
        if (Cue cue = superlative(tokens[k].text); cue != Cue::None) {
          claim.kind = NumericKind::Extremum;
          claim.direction = cue == Cue::Max ? ExtremumDir::Max : ExtremumDir::Min;
        }
      }
      // Bare "average"/"mean" is often part of a column name ("average
      // phone unlock duration"); when the sentence pins a date the claim
      // stays a point lookup and only the verb forms promote it.
      auto aggregate_cue_active = [&](const std::string& w) {
        if (w == "averaged" || w == "averaging") return true;
        return aggregate_mean_cue(w) && dates.empty();
      };
      const std::size_t agg_from =
          num.token_index >= 6 ? num.token_index - 6 : 0;
      for (std::size_t k = agg_from; k < num.token_index; ++k) {
        if (aggregate_cue_active(tokens[k].text)) {
          claim.kind = NumericKind::Aggregate;
          claim.aggregate = AggregateKind::Mean;
        }
        if (tokens[k].text == "total" && k + 2 < tokens.size() &&
            tokens[k + 1].text == "of" && k + 2 == num.token_index) {
          claim.kind = NumericKind::Aggregate;
          claim.aggregate = AggregateKind::Sum;
        }
      }
      // "11,430 steps per day on average"
      for (std::size_t k = num.token_index;
           k < tokens.size() && k < num.token_index + 6; ++k) {
        if (aggregate_cue_active(tokens[k].text) &&
            claim.kind == NumericKind::PointValue) {
          claim.kind = NumericKind::Aggregate;
          claim.aggregate = AggregateKind::Mean;
        }
      }

      // column: local context first, whole sentence as fallback
      std::vector<std::string> local =
          words_of(tokens, num.token_index,
                   std::min(next_num_tok, num.token_index + 8));
      {
        const std::size_t lb = num.token_index >= 4 ? num.token_index - 4 : 0;
        std::vector<std::string> before = words_of(tokens, lb, num.token_index);
        local.insert(local.end(), before.begin(), before.end());
      }
      ColumnMatcher::Scored scored = matcher.score(local, claim.unit_hint);
      if (!scored.column) {
        scored = matcher.score(sentence_words, claim.unit_hint);
      }
      claim.column = scored.column;

      if (claim.kind == NumericKind::Extremum && claim.column) {
        extremum_claim_cols.emplace_back(*claim.column, claim.direction);
      }
      claims.numeric.push_back(std::move(claim));
    }

    // ----- trend claims -----
    // "May 9" is a date, not the modal verb; hedging only counts outside
    // date mentions.
    bool hedged = false;
    for (const Token& t : tokens) {
      if (hedge_word(t.text) && !inside_any(t.begin, t.end, dates)) {
        hedged = true;
        break;
      }
    }
    if (hedged) continue;

    const TrendScope scope = scope_of(tokens);
    auto resolve_sentence_column = [&]() {
      return matcher.score(sentence_words, "").column;
    };

    auto push_trend = [&](TrendClaim&& t) {
      for (const TrendClaim& existing : claims.trends) {
        if (existing.kind == t.kind && existing.column == t.column &&
            existing.scope == t.scope && existing.above == t.above &&
            existing.direction == t.direction &&
            existing.sentence == t.sentence) {
          return;
        }
      }
      claims.trends.push_back(std::move(t));
    };

    for (std::size_t k = 0; k < tokens.size(); ++k) {
      TrendKind kind;
      if (trend_cue(tokens[k].text, kind)) {
        TrendClaim t;
        t.kind = kind;
        t.scope = scope;
        t.column = resolve_sentence_column();
        t.sentence = sentence;
        push_trend(std::move(t));
        continue;
      }
      // extremum at a date; with a number present the superlative belongs
      // to the numeric claim instead
      if (Cue cue = superlative(tokens[k].text); cue != Cue::None) {
        if (!numbers.empty() || dates.empty()) continue;
        TrendClaim t;
        t.kind = TrendKind::ExtremumAtDate;
        t.direction = cue == Cue::Max ? ExtremumDir::Max : ExtremumDir::Min;
        t.scope = scope;
        t.column = resolve_sentence_column();
        t.date = nearest_date(tokens[k].end);
        t.sentence = sentence;
        bool subsumed = false;
        for (const auto& [col, dir] : extremum_claim_cols) {
          if (t.column && *t.column == col && dir == t.direction) subsumed = true;
        }
        if (!subsumed) push_trend(std::move(t));
      }
      // above/below average
      if (tokens[k].text == "average" || tokens[k].text == "averages") {
        bool has_number_right_after = false;
        for (const NumberMention& num : numbers) {
          if (num.token_index >= k && num.token_index <= k + 3) {
            has_number_right_after = true;
          }
        }
        if (has_number_right_after) continue;
        const std::size_t from = k >= 4 ? k - 4 : 0;
        std::optional<bool> above;
        std::size_t comparator = from;
        for (std::size_t b = from; b < k; ++b) {
          const std::string& w = tokens[b].text;
          if (w == "above" || w == "higher" || w == "over" || w == "exceeds" ||
              w == "exceeded") {
            above = true;
            comparator = b;
          } else if (w == "below" || w == "lower" || w == "under" ||
                     w == "beneath") {
            above = false;
            comparator = b;
          }
        }
        if (!above) continue;
        // "...was well above the window average": the comparator tail is
        // claim structure, not a column reference, so it is dropped before
        // matching; otherwise its "average" outbids weak column phrases.
        std::vector<std::string> column_words;
        for (std::size_t b = 0; b < tokens.size(); ++b) {
          if (b >= comparator && b <= k) continue;
          if (inside_any(tokens[b].begin, tokens[b].end, dates)) continue;
          column_words.push_back(singular(tokens[b].text));
        }
        TrendClaim t;
        t.kind = TrendKind::AboveBelowAverage;
        t.above = *above;
        t.scope = scope;
        t.column = matcher.score(column_words, "").column;
        t.date = dates.empty() ? std::nullopt
                               : std::optional<DateRef>(dates.front().ref);
        t.sentence = sentence;
        push_trend(std::move(t));
      }
    }
  }
  return claims;
}

}  // namespace phenollm
