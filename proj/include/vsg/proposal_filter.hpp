#pragma once

#include "vsg/mask.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace vsg {

struct ProposalFilterOptions {
    /// A proposal is kept while less than this fraction of it is already
    /// covered by the proposals kept before it.
    double overlap_thresh = 0.9;
    /// Re-admit rejected proposals that hold the only cover of some pixel, so
    /// the kept set always covers the union of all proposals.
    bool fallback_sweep = true;
};

/// Coverage-preserving greedy redundancy filter.
///
/// Proposals are visited largest first (ties by input index). Returns indices
/// into `proposals` in the order they were admitted: greedy admissions first,
/// then fallback admissions. Empty proposals are never selected. Throws
/// InvalidDimensions when proposal shapes differ.
std::vector<std::size_t> filter_proposals(std::span<const BinaryMask> proposals,
                                          const ProposalFilterOptions& options = {});

} // namespace vsg
