#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace chaos {

// Word substitution table for the word_modify operator: lowercase surface
// form -> ranked candidate replacements (best first). A word must never
// list itself as its own first candidate.
class Lexicon {
 public:
  static Lexicon builtin();
  static Lexicon load(const std::filesystem::path& file);
  static Lexicon from_json_text(const std::string& text);

  void add(std::string word, std::vector<std::string> candidates);

  // Lookup by exact lowercase key; nullptr when absent.
  const std::vector<std::string>* find(std::string_view word) const;

  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, std::vector<std::string>>& entries() const {
    return entries_;
  }

  std::string to_json_text() const;
  void save(const std::filesystem::path& file) const;

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

}  // namespace chaos
