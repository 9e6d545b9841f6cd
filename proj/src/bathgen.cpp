#include "nvgeo/bathgen.hpp"

#include <cmath>
#include <map>

namespace nvgeo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool is_diamond_site(int i, int j, int k) {
  const auto mod4 = [](int v) { return ((v % 4) + 4) % 4; };
  const bool even = (i % 2 == 0) && (j % 2 == 0) && (k % 2 == 0);
  const bool odd = (i % 2 != 0) && (j % 2 != 0) && (k % 2 != 0);
  if (even) return mod4(i + j + k) == 0;
  if (odd) return mod4(i + j + k) == 3;
  return false;
}

bool are_neighbours(const LatticeSite& a, const LatticeSite& b) {
  const int dx = a.cell[0] - b.cell[0];
  const int dy = a.cell[1] - b.cell[1];
  const int dz = a.cell[2] - b.cell[2];
  return dx * dx + dy * dy + dz * dz == 3;
}

}  // namespace

Vector3 nv_frame_position(const std::array<int, 3>& cell) {
  static const Matrix3 rotation = [] {
    Matrix3 r;
    r.row(0) = Vector3(-1.0, -1.0, 2.0).normalized();
    r.row(1) = Vector3(1.0, -1.0, 0.0).normalized();
    r.row(2) = Vector3(1.0, 1.0, 1.0).normalized();
    return r;
  }();
  const double q = kDiamondLatticeConstant / 4.0;
  const Vector3 cubic(cell[0] * q, cell[1] * q, cell[2] * q);
  return rotation * cubic;
}

Lattice diamond_lattice(double radius) {
  if (!(radius > 0.0)) throw ConfigError("lattice radius must be positive");
  if (radius > kMaxLatticeRadius) throw ConfigError("lattice radius exceeds 6 nm");

  const double q = kDiamondLatticeConstant / 4.0;
  const int n = static_cast<int>(std::ceil(radius / q)) + 1;
  const double r2max = radius * radius;

  Lattice lattice;
  lattice.radius = radius;
  for (int i = -n; i <= n; ++i) {
    for (int j = -n; j <= n; ++j) {
      for (int k = -n; k <= n; ++k) {
        if (!is_diamond_site(i, j, k)) continue;
        if (i == 0 && j == 0 && k == 0) continue;  // vacancy
        if (i == 1 && j == 1 && k == 1) continue;  // nitrogen
        const double r2 = static_cast<double>(i * i + j * j + k * k) * q * q;
        if (r2 > r2max) continue;
        LatticeSite site;
        site.index = lattice.sites.size();
        site.cell = {i, j, k};
        site.position = nv_frame_position(site.cell);
        lattice.sites.push_back(site);
      }
    }
  }
  return lattice;
}

double site_uniform(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t bits = splitmix64(splitmix64(seed) ^ splitmix64(~index));
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double electron_coupling_strength(const LatticeSite& site, const NvParams& p) {
  const Matrix3 a = dipolar_tensor(site.position, p.gamma_e, p.gamma_c, p.mu0);
  return a.rowwise().norm().maxCoeff();
}

BathConfig sample_bath(const Lattice& lattice, double abundance, std::uint64_t seed,
                       const NvParams& p) {
  if (!(abundance > 0.0 && abundance <= 0.5)) {
    throw ConfigError("abundance must lie in (0, 0.5]");
  }
  BathConfig bath;
  bath.seed = seed;
  bath.abundance = abundance;
  bath.radius = lattice.radius;

  std::vector<const LatticeSite*> occupied;
  for (const auto& site : lattice.sites) {
    if (site_uniform(seed, site.index) >= abundance) continue;
    if (electron_coupling_strength(site, p) > kHyperfineExclusion) continue;
    occupied.push_back(&site);
  }

  // occupied is in ascending index order; pair each unpaired spin with its
  // lowest-index unpaired neighbour
  std::vector<bool> paired(occupied.size(), false);
  for (std::size_t a = 0; a < occupied.size(); ++a) {
    if (paired[a]) continue;
    for (std::size_t b = a + 1; b < occupied.size(); ++b) {
      if (!paired[b] && are_neighbours(*occupied[a], *occupied[b])) {
        paired[a] = paired[b] = true;
        bath.dimers.push_back({*occupied[a], *occupied[b]});
        break;
      }
    }
  }
  for (std::size_t a = 0; a < occupied.size(); ++a) {
    if (!paired[a]) bath.singles.push_back(*occupied[a]);
  }
  return bath;
}

Matrix3 dimer_internal_coupling(const Dimer& d, const NvParams& p) {
  return dipolar_tensor(d.second.position - d.first.position, p.gamma_c, p.gamma_c, p.mu0);
}

nlohmann::json bath_to_json(const BathConfig& bath) {
  using nlohmann::json;
  std::map<std::size_t, LatticeSite> sites;
  for (const auto& s : bath.singles) sites.emplace(s.index, s);
  for (const auto& d : bath.dimers) {
    sites.emplace(d.first.index, d.first);
    sites.emplace(d.second.index, d.second);
  }
  json doc;
  doc["seed"] = bath.seed;
  doc["abundance"] = bath.abundance;
  doc["radius_nm"] = bath.radius * 1e9;
  // exact radius for bit-exact reload; radius_nm is for humans
  doc["radius_m"] = bath.radius;
  json site_list = json::array();
  for (const auto& [index, s] : sites) {
    site_list.push_back({{"index", index},
                         {"cell", s.cell},
                         {"position_nm", {s.position.x() * 1e9, s.position.y() * 1e9,
                                          s.position.z() * 1e9}}});
  }
  doc["sites"] = std::move(site_list);
  json singles = json::array();
  for (const auto& s : bath.singles) singles.push_back(s.index);
  doc["singles"] = std::move(singles);
  json dimers = json::array();
  for (const auto& d : bath.dimers) dimers.push_back({d.first.index, d.second.index});
  doc["dimers"] = std::move(dimers);
  return doc;
}

BathConfig bath_from_json(const nlohmann::json& doc) {
  try {
    std::map<std::size_t, LatticeSite> sites;
    for (const auto& s : doc.at("sites")) {
      LatticeSite site;
      site.index = s.at("index").get<std::size_t>();
      site.cell = s.at("cell").get<std::array<int, 3>>();
      if (!is_diamond_site(site.cell[0], site.cell[1], site.cell[2])) {
        throw ConfigError("bath document: cell is not a diamond lattice site");
      }
      site.position = nv_frame_position(site.cell);
      sites.emplace(site.index, site);
    }
    const auto lookup = [&](std::size_t index) {
      const auto it = sites.find(index);
      if (it == sites.end()) throw ConfigError("bath document: unknown site index");
      return it->second;
    };
    BathConfig bath;
    bath.seed = doc.at("seed").get<std::uint64_t>();
    bath.abundance = doc.at("abundance").get<double>();
    bath.radius = doc.contains("radius_m") ? doc.at("radius_m").get<double>()
                                           : doc.at("radius_nm").get<double>() * 1e-9;
    for (const auto& i : doc.at("singles")) bath.singles.push_back(lookup(i.get<std::size_t>()));
    for (const auto& pair : doc.at("dimers")) {
      bath.dimers.push_back({lookup(pair.at(0).get<std::size_t>()),
                             lookup(pair.at(1).get<std::size_t>())});
    }
    return bath;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bath document: ") + e.what());
  }
}

}  // namespace nvgeo
