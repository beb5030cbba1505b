#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/spectra.hpp"

namespace rmtlab {

/// Which side of a paired experiment a sample belongs to.
enum class EnsembleRole : std::uint32_t { a = 0, b = 1 };

/// Substream of one trial. The stream word packs role and dimension so
/// experiments at different n under one seed draw from disjoint streams.
inline StreamId trial_stream(std::size_t n, EnsembleRole role, std::uint64_t trial) {
  return {trial, (static_cast<std::uint32_t>(role) << 24) | static_cast<std::uint32_t>(n & 0xFFFFFFu)};
}

/// Spectra of `trials` independent samples, indexed by trial.
using SpectrumSet = std::vector<Spectrum>;

inline SpectrumSet sample_spectra(const EnsembleSpec& spec, std::size_t trials, Seed seed,
                                  EnsembleRole role = EnsembleRole::a, unsigned threads = 1) {
  spec.validate();
  return map_trials(trials, threads, [&](std::size_t t) {
    return eigenvalues(sample_wigner(spec, seed, trial_stream(spec.n, role, t)));
  });
}

}  // namespace rmtlab
