#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "countfit/frequency.hpp"

namespace countfit {

enum class LambdaKind { Constant, Norm, Modal, Log };

std::string_view lambda_kind_name(LambdaKind kind);
std::optional<LambdaKind> lambda_kind_from_name(std::string_view name);

/// Selects how the counting-loss weight is derived from class frequencies.
/// lambda0 is the base weight; the most frequent class always receives it
/// under the frequency-balanced schemes.
struct LambdaScheme {
  LambdaKind kind = LambdaKind::Constant;
  double lambda0 = 1.0;
};

/// (1 - n_class/n_total) * lambda0. Absent classes get the full lambda0.
double lambda_norm(int count, const ClassFrequencyTable& table, double lambda0);

/// (n_modal/n_class) * lambda0. An absent class is assigned the largest
/// weight among the classes that are present.
double lambda_modal(int count, const ClassFrequencyTable& table, double lambda0);

/// log2(log2(n_total/n_class)). Ratios <= 2 leave the double-log domain and
/// are clamped to 0; `clamped`, when provided, reports that.
double sigma_value(int count, const ClassFrequencyTable& table, bool* clamped = nullptr);

/// Sigma for every present class, with the extrema used by the log scheme.
/// Absent classes carry NaN and are excluded from the extrema.
struct SigmaTable {
  std::array<double, kCountClasses> sigma{};
  std::array<bool, kCountClasses> clamped{};
  std::array<bool, kCountClasses> present{};
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

SigmaTable compute_sigma_table(const ClassFrequencyTable& table);

/// ((sigma_class - sigma_min)/sigma_max + 1) * lambda0, divisor sigma_max
/// verbatim. Falls back to lambda0 for every class when sigma_max is 0;
/// absent classes take the largest weight among present ones.
double lambda_log(int count, const ClassFrequencyTable& table, double lambda0);

/// Dispatches to the scheme's formula; Constant returns lambda0 unconditionally.
double lambda_for(const LambdaScheme& scheme, int count, const ClassFrequencyTable& table);

/// The 9-entry weight table precomputed at training start and frozen for the
/// run. `flagged` marks classes whose value came from a clamp, a fallback, or
/// an absent-class rule.
struct LambdaTable {
  LambdaScheme scheme;
  std::array<double, kCountClasses> value{};
  std::array<bool, kCountClasses> flagged{};

  double at(int count) const;

  static LambdaTable build(const LambdaScheme& scheme, const ClassFrequencyTable& table);
};

}  // namespace countfit
