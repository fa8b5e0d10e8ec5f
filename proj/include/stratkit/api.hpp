#pragma once

#include "stratkit/core.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Flat entry points for language bindings: plain vectors in, plain vectors out.
namespace stratkit::api {

/// Fold index per point. `method` is random, is, pmbsrs or optisplit; `measure`
/// (rld or dcp) and `max_epochs` only affect optisplit. Same result as the CLI's
/// split command for the same arguments.
std::vector<FoldId> split(const LabelMatrix& labels, std::string_view method, FoldId k, std::uint64_t seed,
                          std::string_view measure = "rld", int max_epochs = 20);

/// Aggregate ed, ld, dcp and rld of a fold vector; k is one more than the largest index.
std::map<std::string, double> evaluate(const LabelMatrix& labels, std::span<const FoldId> folds);

}  // namespace stratkit::api
