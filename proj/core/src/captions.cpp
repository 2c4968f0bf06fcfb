#include "countfit/captions.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace countfit {

namespace {

constexpr std::array<std::string_view, kCountClasses> kNumberWords = {
    "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"};

bool is_word_char(unsigned char c) {
  // Non-ASCII bytes count as word characters so multi-byte UTF-8 sequences
  // are never split mid-character.
  return std::isalnum(c) || c == '-' || c >= 0x80;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Mirrors the capitalization pattern of `original` onto `replacement`.
std::string apply_case_pattern(std::string_view original, std::string_view replacement) {
  std::string out(replacement);
  bool has_alpha = false;
  bool all_upper = true;
  for (unsigned char c : original) {
    if (std::isalpha(c)) {
      has_alpha = true;
      if (!std::isupper(c)) all_upper = false;
    }
  }
  if (has_alpha && all_upper && original.size() > 1) {
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  } else if (!original.empty() && std::isupper(static_cast<unsigned char>(original.front()))) {
    out.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(out.front())));
  }
  return out;
}

}  // namespace

std::optional<int> number_word_value(std::string_view token) {
  if (token.size() < 3 || token.size() > 5) return std::nullopt;
  const std::string lowered = to_lower(token);
  for (int i = 0; i < kCountClasses; ++i) {
    if (lowered == kNumberWords[static_cast<std::size_t>(i)]) return class_to_count(i);
  }
  return std::nullopt;
}

std::string_view number_word(int value) {
  if (value < kMinCount || value > kMaxCount) {
    throw std::out_of_range("number_word: count must be in [2, 10], got " + std::to_string(value));
  }
  return kNumberWords[static_cast<std::size_t>(count_to_class(value))];
}

std::vector<TokenSpan> word_tokens(std::string_view text) {
  std::vector<TokenSpan> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_char(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t begin = i;
    while (i < text.size() && is_word_char(static_cast<unsigned char>(text[i]))) ++i;
    tokens.push_back({begin, i});
  }
  return tokens;
}

std::optional<CountingCaption> detect_count(std::string_view text) {
  std::optional<CountingCaption> found;
  int matches = 0;
  for (const TokenSpan& span : word_tokens(text)) {
    const auto value = number_word_value(text.substr(span.begin, span.end - span.begin));
    if (!value) continue;
    if (++matches > 1) return std::nullopt;  // ambiguous count
    found = CountingCaption{std::string(text), *value, span.begin, span.end};
  }
  return found;
}

std::string swap_count_word(const CountingCaption& caption, int new_count) {
  const std::string replacement =
      apply_case_pattern(caption.matched_token(), number_word(new_count));
  std::string out = caption.text.substr(0, caption.span_begin);
  out += replacement;
  out += caption.text.substr(caption.span_end);
  return out;
}

std::string make_counterfactual(const CountingCaption& caption, std::mt19937_64& rng) {
  if (caption.count < kMinCount || caption.count > kMaxCount) {
    throw std::out_of_range("make_counterfactual: caption count out of range");
  }
  std::uniform_int_distribution<int> pick(0, kCountClasses - 2);
  int idx = pick(rng);
  // Ascending counts with the true count skipped.
  int candidate = class_to_count(idx);
  if (candidate >= caption.count) candidate += 1;
  return swap_count_word(caption, candidate);
}

std::array<std::string, kCountClasses - 1> make_all_counterfactuals(const CountingCaption& caption) {
  if (caption.count < kMinCount || caption.count > kMaxCount) {
    throw std::out_of_range("make_all_counterfactuals: caption count out of range");
  }
  std::array<std::string, kCountClasses - 1> out;
  std::size_t i = 0;
  for (int j = kMinCount; j <= kMaxCount; ++j) {
    if (j == caption.count) continue;
    out[i++] = swap_count_word(caption, j);
  }
  return out;
}

std::array<std::string, kCountClasses> make_candidate_captions(const CountingCaption& caption) {
  if (caption.count < kMinCount || caption.count > kMaxCount) {
    throw std::out_of_range("make_candidate_captions: caption count out of range");
  }
  std::array<std::string, kCountClasses> out;
  for (int j = kMinCount; j <= kMaxCount; ++j) {
    out[static_cast<std::size_t>(count_to_class(j))] = swap_count_word(caption, j);
  }
  return out;
}

}  // namespace countfit
