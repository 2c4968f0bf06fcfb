#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace countfit {

/// Count classes are the spelled-out English numbers "two" through "ten".
inline constexpr int kMinCount = 2;
inline constexpr int kMaxCount = 10;
inline constexpr int kCountClasses = kMaxCount - kMinCount + 1;

/// Maps a token to its count value if it is one of the nine number words.
/// Comparison is case-insensitive; "twenty-two" and other compounds do not match.
std::optional<int> number_word_value(std::string_view token);

/// Canonical lowercase word for a count in [2, 10]. Throws std::out_of_range otherwise.
std::string_view number_word(int value);

/// True count index helpers: class index 0..8 <-> count 2..10.
inline int count_to_class(int count) { return count - kMinCount; }
inline int class_to_count(int cls) { return cls + kMinCount; }

/// A caption whose text contains exactly one spelled-out count.
/// [span_begin, span_end) is the character range of the matched number word.
struct CountingCaption {
  std::string text;
  int count = 0;
  std::size_t span_begin = 0;
  std::size_t span_end = 0;

  std::string_view matched_token() const {
    return std::string_view(text).substr(span_begin, span_end - span_begin);
  }
};

struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Splits text into word tokens. Tokens are maximal runs of alphanumeric
/// characters, hyphens, and non-ASCII bytes, so hyphenated compounds such as
/// "twenty-two" stay whole and never match a bare number word.
std::vector<TokenSpan> word_tokens(std::string_view text);

/// Finds the spelled-out count in a caption. Returns the single whole-token
/// number-word match; captions with zero or with two or more number-word
/// tokens yield nullopt.
std::optional<CountingCaption> detect_count(std::string_view text);

/// Rewrites the caption with the number word for new_count, mirroring the
/// capitalization of the original token (all-caps and initial-capital are
/// preserved). new_count == caption.count returns the original text.
std::string swap_count_word(const CountingCaption& caption, int new_count);

/// Counterfactual caption: the count swapped to one of the other eight
/// values, drawn uniformly. Deterministic given the rng state.
std::string make_counterfactual(const CountingCaption& caption, std::mt19937_64& rng);

/// All eight counterfactual captions, ordered by ascending count.
std::array<std::string, kCountClasses - 1> make_all_counterfactuals(const CountingCaption& caption);

/// The nine evaluation candidates for counts 2..10 ascending; the entry at
/// index (caption.count - 2) is the original text.
std::array<std::string, kCountClasses> make_candidate_captions(const CountingCaption& caption);

}  // namespace countfit
