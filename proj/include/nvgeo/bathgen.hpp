#pragma once

// Random 13C bath configurations on the diamond lattice.
//
// Lattice sites carry integer coordinates in units of a0/4 in the cubic
// crystal frame; positions are expressed in the NV frame with z along [111]
// and x along [-1,-1,2]. The vacancy sits at the origin and the nitrogen at
// (1,1,1).

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"

#include "nvgeo/nvmodel.hpp"

namespace nvgeo {

inline constexpr double kMaxLatticeRadius = 6e-9;
inline constexpr double kHyperfineExclusion = kTwoPi * 1e5;  // rad/s

struct LatticeSite {
  std::size_t index = 0;         // position in the enumerated lattice
  std::array<int, 3> cell{};     // cubic-frame coordinates, units of a0/4
  Vector3 position = Vector3::Zero();  // NV frame, meters
};

/// Maps cubic-frame integer coordinates to NV-frame meters.
Vector3 nv_frame_position(const std::array<int, 3>& cell);

struct Lattice {
  double radius = 0.0;
  std::vector<LatticeSite> sites;
};

/// All carbon sites within `radius` of the vacancy (nitrogen removed),
/// enumerated in ascending (i, j, k) order.
Lattice diamond_lattice(double radius);

struct Dimer {
  LatticeSite first;
  LatticeSite second;
};

struct BathConfig {
  std::vector<LatticeSite> singles;
  std::vector<Dimer> dimers;
  std::uint64_t seed = 0;
  double abundance = 0.0;
  double radius = 0.0;

  std::size_t spin_count() const { return singles.size() + 2 * dimers.size(); }
};

/// Uniform variate in [0, 1) that depends only on (seed, index).
double site_uniform(std::uint64_t seed, std::uint64_t index);

/// Max over rows of the Euclidean row norm of the electron-13C dipolar tensor.
double electron_coupling_strength(const LatticeSite& site, const NvParams& p);

/// Occupies each site independently with probability `abundance`, drops
/// sites coupled more strongly than 2 pi x 0.1 MHz, and pairs occupied
/// nearest neighbours into dimers greedily in ascending index order.
BathConfig sample_bath(const Lattice& lattice, double abundance, std::uint64_t seed,
                       const NvParams& p);

/// Intra-dimer 13C-13C dipolar tensor (rad/s).
Matrix3 dimer_internal_coupling(const Dimer& d, const NvParams& p);

// JSON document: seed, abundance, radius_nm, sites (index, cell, position_nm),
// singles (indices into sites) and dimers (index pairs). Positions are rebuilt
// from the integer cells on load so a round trip is bit-exact.
nlohmann::json bath_to_json(const BathConfig& bath);
BathConfig bath_from_json(const nlohmann::json& doc);

}  // namespace nvgeo
