#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ssreg/eigenvals.hpp"
#include "ssreg/instance.hpp"
#include "ssreg/model_index.hpp"
#include "ssreg/priors.hpp"

namespace ssreg {

struct ModelEntry {
    ModelIndex xi;
    double log_evidence = 0.0;
    double log_prior = 0.0;
    double mass = 0.0;  // normalized over enumerated full-rank models
};

//! Exact model posterior over all full-rank models up to max_size; models
//! above max_size are truncated and accounted for by an upper bound on the
//! missing mass. Rank-deficient models carry mass exactly 0 and are not
//! stored (their count is implied by total - stored).
struct ModelPosterior {
    std::vector<ModelEntry> entries;   // enumeration order; use sorted_entries for reports
    double log_normalizer = 0.0;       // log sum of evidence * prior over entries
    double truncated_mass_bound = 0.0; // upper bound on posterior mass beyond max_size
    int max_size = 0;
    std::uint64_t num_rank_deficient = 0;  // excluded models of size <= max_size

    double mass_of(const ModelIndex& xi) const;
    const ModelEntry* find(const ModelIndex& xi) const;
    //! Entries ordered by decreasing mass, ties by model index.
    std::vector<ModelEntry> sorted_entries() const;

  private:
    friend ModelPosterior exact_posterior(const ProblemInstance&, const PriorSpec&, int,
                                          std::uint64_t);
    std::unordered_map<ModelIndex, int, ModelIndexHash> index_;
};

//! Enumerates every full-rank model of size <= max_size, scores it with the
//! closed-form evidence, and normalizes against the selection prior.
ModelPosterior exact_posterior(const ProblemInstance& instance, const PriorSpec& prior,
                               int max_size, std::uint64_t cap = kDefaultSubsetCap);

} // namespace ssreg
