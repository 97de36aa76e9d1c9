#include "chaos/text.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chaos/lexicon.hpp"

namespace chaos {

namespace {

constexpr std::string_view kAlnum =
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

bool ascii_alnum(char32_t cp) {
  return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
         (cp >= '0' && cp <= '9');
}

}  // namespace

std::u32string utf8_decode(const std::string& s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0, n = s.size();
  while (i < n) {
    unsigned char b = static_cast<unsigned char>(s[i]);
    if (b < 0x80) {
      out.push_back(b);
      ++i;
      continue;
    }
    int len = 0;
    if ((b & 0xE0) == 0xC0) len = 2;
    else if ((b & 0xF0) == 0xE0) len = 3;
    else if ((b & 0xF8) == 0xF0) len = 4;
    bool ok = len > 0 && i + len <= n;
    char32_t cp = ok ? (b & (0xFF >> (len + 1))) : 0;
    if (ok) {
      for (int k = 1; k < len; ++k) {
        unsigned char c = static_cast<unsigned char>(s[i + k]);
        if ((c & 0xC0) != 0x80) {
          ok = false;
          break;
        }
        cp = (cp << 6) | (c & 0x3F);
      }
    }
    if (!ok) {
      out.push_back(b);  // lenient: keep the raw byte as a code point
      ++i;
    } else {
      out.push_back(cp);
      i += len;
    }
  }
  return out;
}

std::string utf8_encode(const std::u32string& s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

bool is_word_cp(char32_t cp) { return ascii_alnum(cp) || cp >= 0x80; }

bool is_space_cp(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\v' ||
         cp == '\f';
}

bool is_punct_cp(char32_t cp) {
  return cp >= 0x21 && cp <= 0x7E && !ascii_alnum(cp);
}

std::vector<Span> word_spans(const std::u32string& cps) {
  std::vector<Span> out;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (!is_word_cp(cps[i])) {
      ++i;
      continue;
    }
    std::size_t b = i;
    while (i < cps.size() && is_word_cp(cps[i])) ++i;
    out.push_back({b, i});
  }
  return out;
}

int edit_count(double rate, std::size_t eligible) {
  if (rate < 0.0) throw std::invalid_argument("edit_count: rate < 0");
  long k = std::lround(rate * static_cast<double>(eligible));
  return static_cast<int>(std::max(1L, k));
}

namespace {

bool index_protected(const std::vector<Span>& spans, std::size_t i) {
  for (const Span& s : spans) {
    if (s.contains(i)) return true;
  }
  return false;
}

// Insertion slots touch nothing: only slots strictly inside a span are off
// limits, boundaries are fine.
bool slot_protected(const std::vector<Span>& spans, std::size_t slot) {
  for (const Span& s : spans) {
    if (slot > s.begin && slot < s.end) return true;
  }
  return false;
}

bool span_overlaps(const std::vector<Span>& spans, const Span& w) {
  for (const Span& s : spans) {
    if (w.begin < s.end && s.begin < w.end) return true;
  }
  return false;
}

// Pinned selection: draw an index below the pool size, take that element,
// erase it. The pool stays in ascending order between draws.
std::size_t draw_from_pool(std::vector<std::size_t>& pool, RngStream& rng) {
  std::uint32_t j = rng.uniform_below(static_cast<std::uint32_t>(pool.size()));
  std::size_t v = pool[j];
  pool.erase(pool.begin() + j);
  return v;
}

char32_t draw_alnum(RngStream& rng) {
  return static_cast<char32_t>(
      kAlnum[rng.uniform_below(static_cast<std::uint32_t>(kAlnum.size()))]);
}

struct PlanPair {
  std::size_t pos;
  char32_t ch;
};

void sort_pairs_into(EditPlan& plan, std::vector<PlanPair>& pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const PlanPair& a, const PlanPair& b) { return a.pos < b.pos; });
  for (const PlanPair& p : pairs) {
    plan.positions.push_back(p.pos);
    plan.chars.push_back(p.ch);
  }
}

}  // namespace

EditPlan plan_char_add(const TextSample& sample, int count, RngStream& rng) {
  EditPlan plan;
  plan.kind = PerturbationKind::CA;
  if (count <= 0) return plan;
  std::u32string cps = utf8_decode(sample.text);
  std::vector<std::size_t> pool;
  for (std::size_t s = 0; s <= cps.size(); ++s) {
    if (!slot_protected(sample.protected_spans, s)) pool.push_back(s);
  }
  int k = std::min<std::size_t>(count, pool.size());
  std::vector<PlanPair> pairs;
  for (int i = 0; i < k; ++i) {
    std::size_t slot = draw_from_pool(pool, rng);
    pairs.push_back({slot, draw_alnum(rng)});
  }
  sort_pairs_into(plan, pairs);
  return plan;
}

EditPlan plan_char_delete(const TextSample& sample, int count, RngStream& rng) {
  EditPlan plan;
  plan.kind = PerturbationKind::CD;
  if (count <= 0) return plan;
  std::u32string cps = utf8_decode(sample.text);
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (is_space_cp(cps[i]) || is_punct_cp(cps[i])) continue;
    if (index_protected(sample.protected_spans, i)) continue;
    pool.push_back(i);
  }
  if (pool.empty()) return plan;
  // never delete the last eligible character
  int k = std::min<std::size_t>(count, pool.size() - 1);
  for (int i = 0; i < k; ++i) plan.positions.push_back(draw_from_pool(pool, rng));
  std::sort(plan.positions.begin(), plan.positions.end());
  return plan;
}

EditPlan plan_char_replace(const TextSample& sample, int count,
                           RngStream& rng) {
  EditPlan plan;
  plan.kind = PerturbationKind::CR;
  if (count <= 0) return plan;
  std::u32string cps = utf8_decode(sample.text);
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (is_space_cp(cps[i])) continue;
    if (index_protected(sample.protected_spans, i)) continue;
    pool.push_back(i);
  }
  int k = std::min<std::size_t>(count, pool.size());
  std::vector<PlanPair> pairs;
  for (int i = 0; i < k; ++i) {
    std::size_t pos = draw_from_pool(pool, rng);
    char32_t original = cps[pos];
    char32_t ch;
    do {
      ch = draw_alnum(rng);
    } while (ch == original);
    pairs.push_back({pos, ch});
  }
  sort_pairs_into(plan, pairs);
  return plan;
}

EditPlan plan_char_swap(const TextSample& sample, int count, RngStream& rng) {
  EditPlan plan;
  plan.kind = PerturbationKind::CS;
  if (count <= 0) return plan;
  std::u32string cps = utf8_decode(sample.text);
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i + 1 < cps.size(); ++i) {
    if (!is_word_cp(cps[i]) || !is_word_cp(cps[i + 1])) continue;
    if (index_protected(sample.protected_spans, i) ||
        index_protected(sample.protected_spans, i + 1)) {
      continue;
    }
    pool.push_back(i);
  }
  int taken = 0;
  while (taken < count && !pool.empty()) {
    std::size_t p = draw_from_pool(pool, rng);
    plan.positions.push_back(p);
    ++taken;
    // neighbours would overlap this swap; retire them
    std::erase_if(pool, [p](std::size_t q) { return q + 1 == p || q == p + 1; });
  }
  std::sort(plan.positions.begin(), plan.positions.end());
  return plan;
}

namespace {

std::string fold_ascii_lower(const std::u32string& word) {
  std::string out;
  for (char32_t cp : word) {
    if (cp >= 'A' && cp <= 'Z') cp += 32;
    out += utf8_encode(std::u32string(1, cp));
  }
  return out;
}

std::string match_case(const std::u32string& original,
                       const std::string& replacement) {
  bool has_alpha = false, all_upper = true, first_upper = false;
  for (std::size_t i = 0; i < original.size(); ++i) {
    char32_t cp = original[i];
    if (cp <= 0x7F && std::isalpha(static_cast<int>(cp))) {
      has_alpha = true;
      if (i == 0 && std::isupper(static_cast<int>(cp))) first_upper = true;
      if (std::islower(static_cast<int>(cp))) all_upper = false;
    }
  }
  std::string out = replacement;
  if (!has_alpha) return out;
  if (all_upper && original.size() > 1) {
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  } else if (first_upper && !out.empty()) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

}  // namespace

EditPlan plan_word_modify(const TextSample& sample, int count,
                          const Lexicon& lexicon, RngStream& rng) {
  constexpr std::uint32_t kTopCandidates = 3;
  EditPlan plan;
  plan.kind = PerturbationKind::WM;
  if (count <= 0) return plan;
  std::u32string cps = utf8_decode(sample.text);
  std::vector<Span> words = word_spans(cps);
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (span_overlaps(sample.protected_spans, words[i])) continue;
    std::u32string w = cps.substr(words[i].begin, words[i].end - words[i].begin);
    const auto* cands = lexicon.find(fold_ascii_lower(w));
    if (cands && !cands->empty()) pool.push_back(i);
  }
  int k = std::min<std::size_t>(count, pool.size());
  struct Pick {
    Span span;
    std::string word;
  };
  std::vector<Pick> picks;
  for (int i = 0; i < k; ++i) {
    std::size_t wi = draw_from_pool(pool, rng);
    const Span& span = words[wi];
    std::u32string original = cps.substr(span.begin, span.end - span.begin);
    const auto& cands = *lexicon.find(fold_ascii_lower(original));
    std::uint32_t top =
        std::min<std::uint32_t>(kTopCandidates,
                                static_cast<std::uint32_t>(cands.size()));
    std::string chosen = cands[rng.uniform_below(top)];
    picks.push_back({span, match_case(original, chosen)});
  }
  std::sort(picks.begin(), picks.end(),
            [](const Pick& a, const Pick& b) { return a.span.begin < b.span.begin; });
  for (Pick& p : picks) {
    plan.word_spans.push_back(p.span);
    plan.words.push_back(std::move(p.word));
  }
  return plan;
}

namespace {

void check_sorted_distinct(const std::vector<std::size_t>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i - 1] >= v[i]) {
      throw std::invalid_argument("edit plan: positions must be sorted and distinct");
    }
  }
}

}  // namespace

TextSample apply_plan(const TextSample& sample, const EditPlan& plan) {
  std::u32string cps = utf8_decode(sample.text);
  const std::size_t n = cps.size();
  TextSample out;
  out.metadata = sample.metadata;
  std::vector<Span> spans = sample.protected_spans;

  switch (plan.kind) {
    case PerturbationKind::CA: {
      check_sorted_distinct(plan.positions);
      if (plan.positions.size() != plan.chars.size()) {
        throw std::invalid_argument("edit plan: insert chars/positions mismatch");
      }
      if (!plan.positions.empty() && plan.positions.back() > n) {
        throw std::invalid_argument("edit plan: insert slot out of range");
      }
      std::u32string res;
      res.reserve(n + plan.positions.size());
      std::size_t next = 0;
      for (std::size_t i = 0; i <= n; ++i) {
        while (next < plan.positions.size() && plan.positions[next] == i) {
          res.push_back(plan.chars[next]);
          ++next;
        }
        if (i < n) res.push_back(cps[i]);
      }
      for (Span& s : spans) {
        std::size_t shift = 0;
        for (std::size_t slot : plan.positions) {
          if (slot <= s.begin) ++shift;
        }
        s.begin += shift;
        s.end += shift;
      }
      out.text = utf8_encode(res);
      break;
    }
    case PerturbationKind::CD: {
      check_sorted_distinct(plan.positions);
      if (!plan.positions.empty() && plan.positions.back() >= n) {
        throw std::invalid_argument("edit plan: delete position out of range");
      }
      std::u32string res;
      res.reserve(n);
      std::size_t next = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (next < plan.positions.size() && plan.positions[next] == i) {
          ++next;
          continue;
        }
        res.push_back(cps[i]);
      }
      for (Span& s : spans) {
        std::size_t db = 0, de = 0;
        for (std::size_t pos : plan.positions) {
          if (pos < s.begin) ++db;
          if (pos < s.end) ++de;
        }
        s.begin -= db;
        s.end -= de;
      }
      out.text = utf8_encode(res);
      break;
    }
    case PerturbationKind::CR: {
      check_sorted_distinct(plan.positions);
      if (plan.positions.size() != plan.chars.size()) {
        throw std::invalid_argument("edit plan: replace chars/positions mismatch");
      }
      std::u32string res = cps;
      for (std::size_t i = 0; i < plan.positions.size(); ++i) {
        if (plan.positions[i] >= n) {
          throw std::invalid_argument("edit plan: replace position out of range");
        }
        res[plan.positions[i]] = plan.chars[i];
      }
      out.text = utf8_encode(res);
      break;
    }
    case PerturbationKind::CS: {
      check_sorted_distinct(plan.positions);
      std::u32string res = cps;
      for (std::size_t i = 0; i < plan.positions.size(); ++i) {
        std::size_t p = plan.positions[i];
        if (p + 1 >= n) {
          throw std::invalid_argument("edit plan: swap position out of range");
        }
        if (i + 1 < plan.positions.size() && plan.positions[i + 1] <= p + 1) {
          throw std::invalid_argument("edit plan: overlapping swaps");
        }
        std::swap(res[p], res[p + 1]);
      }
      out.text = utf8_encode(res);
      break;
    }
    case PerturbationKind::WM: {
      if (plan.word_spans.size() != plan.words.size()) {
        throw std::invalid_argument("edit plan: word spans/replacements mismatch");
      }
      std::u32string res;
      std::size_t cursor = 0;
      std::vector<std::ptrdiff_t> deltas(plan.word_spans.size());
      for (std::size_t i = 0; i < plan.word_spans.size(); ++i) {
        const Span& w = plan.word_spans[i];
        if (w.begin < cursor || w.end > n || w.begin >= w.end) {
          throw std::invalid_argument("edit plan: bad word span");
        }
        res.append(cps, cursor, w.begin - cursor);
        std::u32string rep = utf8_decode(plan.words[i]);
        deltas[i] = static_cast<std::ptrdiff_t>(rep.size()) -
                    static_cast<std::ptrdiff_t>(w.end - w.begin);
        res += rep;
        cursor = w.end;
      }
      res.append(cps, cursor, n - cursor);
      for (Span& s : spans) {
        std::ptrdiff_t shift = 0;
        for (std::size_t i = 0; i < plan.word_spans.size(); ++i) {
          if (plan.word_spans[i].end <= s.begin) shift += deltas[i];
        }
        s.begin = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(s.begin) + shift);
        s.end = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(s.end) + shift);
      }
      out.text = utf8_encode(res);
      break;
    }
    default:
      throw std::invalid_argument("edit plan: not a textual kind");
  }
  out.protected_spans = std::move(spans);
  return out;
}

namespace {

TextSample run_char_op(const TextSample& s, const PerturbationSpec& spec,
                       RngStream& rng, const char* note_key,
                       EditPlan (*planner)(const TextSample&, int, RngStream&),
                       std::size_t eligible) {
  double rate = spec.param("rate");
  if (rate < 0) throw std::invalid_argument("textual op: rate < 0");
  if (eligible == 0) {
    TextSample out = s;
    out.metadata[note_key] = "no_eligible_targets";
    return out;
  }
  EditPlan plan = planner(s, edit_count(rate, eligible), rng);
  if (plan.positions.empty() && plan.word_spans.empty()) {
    TextSample out = s;
    out.metadata[note_key] = "no_eligible_targets";
    return out;
  }
  return apply_plan(s, plan);
}

std::size_t count_add_slots(const TextSample& s) {
  std::u32string cps = utf8_decode(s.text);
  std::size_t n = 0;
  for (std::size_t slot = 0; slot <= cps.size(); ++slot) {
    if (!slot_protected(s.protected_spans, slot)) ++n;
  }
  return n;
}

std::size_t count_delete_targets(const TextSample& s) {
  std::u32string cps = utf8_decode(s.text);
  std::size_t n = 0;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (!is_space_cp(cps[i]) && !is_punct_cp(cps[i]) &&
        !index_protected(s.protected_spans, i)) {
      ++n;
    }
  }
  return n;
}

std::size_t count_replace_targets(const TextSample& s) {
  std::u32string cps = utf8_decode(s.text);
  std::size_t n = 0;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (!is_space_cp(cps[i]) && !index_protected(s.protected_spans, i)) ++n;
  }
  return n;
}

std::size_t count_swap_targets(const TextSample& s) {
  std::u32string cps = utf8_decode(s.text);
  std::size_t n = 0;
  for (std::size_t i = 0; i + 1 < cps.size(); ++i) {
    if (is_word_cp(cps[i]) && is_word_cp(cps[i + 1]) &&
        !index_protected(s.protected_spans, i) &&
        !index_protected(s.protected_spans, i + 1)) {
      ++n;
    }
  }
  return n;
}

}  // namespace

TextSample char_add(const TextSample& s, const PerturbationSpec& spec,
                    RngStream& rng) {
  if (spec.level == 0) return s;
  return run_char_op(s, spec, rng, "char_add", plan_char_add,
                     count_add_slots(s));
}

TextSample char_delete(const TextSample& s, const PerturbationSpec& spec,
                       RngStream& rng) {
  if (spec.level == 0) return s;
  return run_char_op(s, spec, rng, "char_delete", plan_char_delete,
                     count_delete_targets(s));
}

TextSample char_replace(const TextSample& s, const PerturbationSpec& spec,
                        RngStream& rng) {
  if (spec.level == 0) return s;
  return run_char_op(s, spec, rng, "char_replace", plan_char_replace,
                     count_replace_targets(s));
}

TextSample char_swap(const TextSample& s, const PerturbationSpec& spec,
                     RngStream& rng) {
  if (spec.level == 0) return s;
  return run_char_op(s, spec, rng, "char_swap", plan_char_swap,
                     count_swap_targets(s));
}

TextSample word_modify(const TextSample& s, const PerturbationSpec& spec,
                       const Lexicon& lexicon, RngStream& rng) {
  if (spec.level == 0) return s;
  double rate = spec.param("rate");
  if (rate < 0) throw std::invalid_argument("word_modify: rate < 0");
  std::u32string cps = utf8_decode(s.text);
  std::vector<Span> words = word_spans(cps);
  std::size_t eligible = 0;
  for (const Span& w : words) {
    if (span_overlaps(s.protected_spans, w)) continue;
    const auto* cands =
        lexicon.find(fold_ascii_lower(cps.substr(w.begin, w.end - w.begin)));
    if (cands && !cands->empty()) ++eligible;
  }
  if (eligible == 0) {
    TextSample out = s;
    out.metadata["word_modify"] = "no_eligible_words";
    return out;
  }
  EditPlan plan =
      plan_word_modify(s, edit_count(rate, eligible), lexicon, rng);
  return apply_plan(s, plan);
}

TextSample apply_textual(const TextSample& s, const PerturbationSpec& spec,
                         RngStream& rng, const Lexicon* lexicon) {
  if (!is_textual(spec.kind)) {
    throw std::invalid_argument("apply_textual: " +
                                std::string(kind_code(spec.kind)) +
                                " is a visual kind");
  }
  if (spec.level == 0) return s;
  switch (spec.kind) {
    case PerturbationKind::CA: return char_add(s, spec, rng);
    case PerturbationKind::CD: return char_delete(s, spec, rng);
    case PerturbationKind::CR: return char_replace(s, spec, rng);
    case PerturbationKind::CS: return char_swap(s, spec, rng);
    case PerturbationKind::WM: {
      if (lexicon) return word_modify(s, spec, *lexicon, rng);
      static const Lexicon fallback = Lexicon::builtin();
      return word_modify(s, spec, fallback, rng);
    }
    default: break;
  }
  throw std::invalid_argument("apply_textual: unhandled kind");
}

}  // namespace chaos
