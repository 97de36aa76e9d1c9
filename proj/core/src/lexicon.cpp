#include "chaos/lexicon.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chaos/errors.hpp"

namespace chaos {

namespace {
using nlohmann::json;

void check_entry(const std::string& word,
                 const std::vector<std::string>& candidates) {
  if (word.empty()) throw ConfigError("lexicon: empty word key");
  for (char c : word) {
    if (std::isupper(static_cast<unsigned char>(c))) {
      throw ConfigError("lexicon: keys must be lowercase, got '" + word + "'");
    }
  }
  if (candidates.empty()) {
    throw ConfigError("lexicon: '" + word + "' has no candidates");
  }
  for (const std::string& c : candidates) {
    if (c.empty()) throw ConfigError("lexicon: '" + word + "' has an empty candidate");
  }
  if (candidates.front() == word) {
    throw ConfigError("lexicon: '" + word + "' lists itself as first candidate");
  }
}
}  // namespace

void Lexicon::add(std::string word, std::vector<std::string> candidates) {
  check_entry(word, candidates);
  entries_[std::move(word)] = std::move(candidates);
}

const std::vector<std::string>* Lexicon::find(std::string_view word) const {
  auto it = entries_.find(std::string(word));
  return it == entries_.end() ? nullptr : &it->second;
}

Lexicon Lexicon::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("lexicon: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("lexicon: top level must be an object");
  Lexicon lex;
  for (const auto& [word, value] : doc.items()) {
    if (!value.is_array()) {
      throw ConfigError("lexicon: '" + word + "' must map to an array");
    }
    std::vector<std::string> cands;
    for (const auto& c : value) {
      if (!c.is_string()) {
        throw ConfigError("lexicon: '" + word + "' has a non-string candidate");
      }
      cands.push_back(c.get<std::string>());
    }
    lex.add(word, std::move(cands));
  }
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("lexicon: cannot open " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return from_json_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

std::string Lexicon::to_json_text() const {
  json doc = json::object();
  for (const auto& [word, cands] : entries_) doc[word] = cands;
  return doc.dump(2) + "\n";
}

void Lexicon::save(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("lexicon: cannot write " + file.string());
  out << to_json_text();
  if (!out) throw IoError("lexicon: write failed for " + file.string());
}

Lexicon Lexicon::builtin() {
  Lexicon lex;
  // Chart-question vocabulary: comparatives, aggregates, axes, colors and
  // the other words these queries lean on, each with plausible confusions
  // ranked most-distracting first.
  lex.add("highest", {"lowest", "largest"});
  lex.add("lowest", {"highest", "smallest"});
  lex.add("higher", {"lower"});
  lex.add("lower", {"higher"});
  lex.add("maximum", {"minimum", "peak"});
  lex.add("minimum", {"maximum", "smallest"});
  lex.add("max", {"min"});
  lex.add("min", {"max"});
  lex.add("most", {"least", "many"});
  lex.add("least", {"most", "fewest"});
  lex.add("more", {"less", "fewer"});
  lex.add("less", {"more"});
  lex.add("fewer", {"more"});
  lex.add("greater", {"smaller", "lesser"});
  lex.add("smaller", {"greater", "larger"});
  lex.add("larger", {"smaller"});
  lex.add("largest", {"smallest", "biggest"});
  lex.add("smallest", {"largest", "tiniest"});
  lex.add("biggest", {"smallest"});
  lex.add("increase", {"decrease", "rise"});
  lex.add("decrease", {"increase", "drop"});
  lex.add("increased", {"decreased", "rose"});
  lex.add("decreased", {"increased", "fell"});
  lex.add("increasing", {"decreasing"});
  lex.add("decreasing", {"increasing"});
  lex.add("rise", {"fall", "increase"});
  lex.add("fall", {"rise", "decline"});
  lex.add("growth", {"decline", "rise"});
  lex.add("decline", {"growth", "fall"});
  lex.add("peak", {"trough", "maximum"});
  lex.add("sum", {"difference", "total"});
  lex.add("total", {"partial", "sum"});
  lex.add("difference", {"sum", "ratio"});
  lex.add("average", {"median", "mean"});
  lex.add("mean", {"median", "average"});
  lex.add("median", {"mean", "average"});
  lex.add("ratio", {"difference", "rate"});
  lex.add("rate", {"ratio", "level"});
  lex.add("percentage", {"proportion", "percent"});
  lex.add("percent", {"percentage"});
  lex.add("share", {"portion", "fraction"});
  lex.add("portion", {"share"});
  lex.add("fraction", {"portion", "share"});
  lex.add("value", {"count", "number"});
  lex.add("values", {"counts", "numbers"});
  lex.add("number", {"value", "count"});
  lex.add("numbers", {"values"});
  lex.add("count", {"number"});
  lex.add("first", {"last", "initial"});
  lex.add("last", {"first", "final"});
  lex.add("final", {"initial", "last"});
  lex.add("initial", {"final", "first"});
  lex.add("top", {"bottom"});
  lex.add("bottom", {"top"});
  lex.add("left", {"right"});
  lex.add("right", {"left"});
  lex.add("leftmost", {"rightmost"});
  lex.add("rightmost", {"leftmost"});
  lex.add("above", {"below", "over"});
  lex.add("below", {"above", "under"});
  lex.add("over", {"under", "above"});
  lex.add("under", {"over", "below"});
  lex.add("between", {"among", "within"});
  lex.add("before", {"after"});
  lex.add("after", {"before"});
  lex.add("blue", {"red", "green"});
  lex.add("red", {"blue", "orange"});
  lex.add("green", {"blue", "yellow"});
  lex.add("yellow", {"green", "orange"});
  lex.add("orange", {"red", "purple"});
  lex.add("purple", {"orange", "pink"});
  lex.add("pink", {"purple", "red"});
  lex.add("black", {"white", "gray"});
  lex.add("white", {"black"});
  lex.add("gray", {"black", "grey"});
  lex.add("grey", {"gray", "black"});
  lex.add("brown", {"black", "orange"});
  lex.add("bar", {"line", "column"});
  lex.add("bars", {"lines", "columns"});
  lex.add("line", {"bar", "curve"});
  lex.add("lines", {"bars", "curves"});
  lex.add("pie", {"bar", "donut"});
  lex.add("chart", {"graph", "plot"});
  lex.add("graph", {"chart", "plot"});
  lex.add("plot", {"chart", "graph"});
  lex.add("axis", {"scale", "legend"});
  lex.add("legend", {"axis", "label"});
  lex.add("label", {"legend", "title"});
  lex.add("title", {"label", "caption"});
  lex.add("segment", {"slice", "section"});
  lex.add("slice", {"segment", "wedge"});
  lex.add("category", {"group", "series"});
  lex.add("categories", {"groups", "series"});
  lex.add("series", {"category", "group"});
  lex.add("year", {"month", "decade"});
  lex.add("years", {"months", "decades"});
  lex.add("month", {"year", "week"});
  lex.add("months", {"years", "weeks"});
  lex.add("week", {"month", "day"});
  lex.add("day", {"week", "year"});
  lex.add("daily", {"weekly", "yearly"});
  lex.add("yearly", {"monthly", "daily"});
  lex.add("annual", {"monthly", "quarterly"});
  lex.add("men", {"women", "males"});
  lex.add("women", {"men", "females"});
  lex.add("male", {"female"});
  lex.add("female", {"male"});
  lex.add("males", {"females"});
  lex.add("females", {"males"});
  lex.add("adults", {"children"});
  lex.add("children", {"adults"});
  lex.add("country", {"region", "nation"});
  lex.add("countries", {"regions", "nations"});
  lex.add("region", {"country", "area"});
  lex.add("state", {"country", "province"});
  lex.add("people", {"persons", "respondents"});
  lex.add("population", {"people", "census"});
  lex.add("respondents", {"participants", "people"});
  lex.add("many", {"few"});
  lex.add("few", {"many"});
  lex.add("all", {"none", "some"});
  lex.add("none", {"all"});
  lex.add("show", {"hide", "display"});
  lex.add("shown", {"hidden", "displayed"});
  lex.add("how", {"what", "why"});
  lex.add("what", {"which", "how"});
  lex.add("which", {"what"});
  lex.add("when", {"where"});
  lex.add("where", {"when"});
  lex.add("who", {"whom"});
  lex.add("why", {"how"});
  lex.add("did", {"does"});
  lex.add("does", {"did"});
  lex.add("is", {"was"});
  lex.add("was", {"is"});
  lex.add("are", {"were"});
  lex.add("were", {"are"});
  lex.add("will", {"would"});
  lex.add("exceed", {"trail", "surpass"});
  lex.add("surpass", {"trail", "exceed"});
  lex.add("combined", {"separate", "together"});
  lex.add("overall", {"partial", "combined"});
  lex.add("majority", {"minority"});
  lex.add("minority", {"majority"});
  return lex;
}

}  // namespace chaos
