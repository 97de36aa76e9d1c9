#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chaos/rng.hpp"
#include "chaos/schedule.hpp"

namespace chaos {

class Lexicon;

// Half-open range of code point indices.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool contains(std::size_t i) const { return i >= begin && i < end; }
  bool operator==(const Span&) const = default;
};

// A query string plus regions the editors must not touch (insertions are
// allowed at span boundaries, edits strictly inside are not). Metadata
// carries operator notes, e.g. when no eligible target existed.
struct TextSample {
  std::string text;  // UTF-8
  std::vector<Span> protected_spans;
  std::map<std::string, std::string> metadata;
};

// Minimal UTF-8 transcoding. Invalid bytes decode as their Latin-1 code
// point; inputs are expected to be valid UTF-8.
std::u32string utf8_decode(const std::string& s);
std::string utf8_encode(const std::u32string& s);

// Character classes used for eligibility. "Word" characters are ASCII
// alphanumerics plus every code point >= 0x80.
bool is_word_cp(char32_t cp);
bool is_space_cp(char32_t cp);
bool is_punct_cp(char32_t cp);

// Tokenized word: [begin,end) code point span.
std::vector<Span> word_spans(const std::u32string& cps);

// Deterministic description of the edits one operator run decided on.
// Exposed so tests can replay hand-written plans through the applier.
struct EditPlan {
  PerturbationKind kind = PerturbationKind::CA;
  // CA: insertion slots (code point index 0..N). CD/CR: target indices.
  // CS: left index of each adjacent swap. Sorted ascending, disjoint.
  std::vector<std::size_t> positions;
  // CA/CR: replacement code points, paired with positions.
  std::u32string chars;
  // WM: replaced word spans plus their replacement strings.
  std::vector<Span> word_spans;
  std::vector<std::string> words;
};

TextSample apply_plan(const TextSample& sample, const EditPlan& plan);

// K = max(1, round(rate * eligible)); the per-operator clamps are applied
// by the planners themselves.
int edit_count(double rate, std::size_t eligible);

// Planners: choose targets and replacements from `rng` in a pinned order.
EditPlan plan_char_add(const TextSample& sample, int count, RngStream& rng);
EditPlan plan_char_delete(const TextSample& sample, int count, RngStream& rng);
EditPlan plan_char_replace(const TextSample& sample, int count, RngStream& rng);
EditPlan plan_char_swap(const TextSample& sample, int count, RngStream& rng);
EditPlan plan_word_modify(const TextSample& sample, int count,
                          const Lexicon& lexicon, RngStream& rng);

// ----- the five textual operators -----

TextSample char_add(const TextSample& s, const PerturbationSpec& spec, RngStream& rng);
TextSample char_delete(const TextSample& s, const PerturbationSpec& spec, RngStream& rng);
TextSample char_replace(const TextSample& s, const PerturbationSpec& spec, RngStream& rng);
TextSample char_swap(const TextSample& s, const PerturbationSpec& spec, RngStream& rng);
TextSample word_modify(const TextSample& s, const PerturbationSpec& spec,
                       const Lexicon& lexicon, RngStream& rng);

// Dispatch by spec.kind; rejects visual kinds. word_modify uses the
// built-in lexicon when none is supplied.
TextSample apply_textual(const TextSample& s, const PerturbationSpec& spec,
                         RngStream& rng, const Lexicon* lexicon = nullptr);

}  // namespace chaos
