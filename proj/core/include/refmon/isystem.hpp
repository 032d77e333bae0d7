#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "refmon/fgab.hpp"
#include "refmon/poset.hpp"

namespace refmon {

enum class Kind { Free, Reg };

std::string to_string(Kind k);

/// A map phi_ji given on input: (n, g) -> n c + h g when `from` is free, g -> h g otherwise.
struct MapSpec {
  std::size_t from = 0;
  std::size_t to = 0;
  std::optional<IntVector> c;
  IntMatrix h;
};

/// Unvalidated system data.
struct SystemSpec {
  Poset poset;
  std::vector<Kind> kinds;
  std::vector<FgGroup> groups;
  std::vector<MapSpec> maps;
};

struct Violation {
  std::string condition;  // "structure", "hom", "c1" or "c2"
  std::string where;
  std::string message;
  std::string to_string() const;
};

/// A validated I-system. Maps are held for every comparable pair.
class ISystem {
 public:
  /// Validates and builds; throws InvalidSystem listing the violations.
  static ISystem create(const SystemSpec& spec);
  static std::variant<ISystem, std::vector<Violation>> try_create(const SystemSpec& spec);

  const Poset& poset() const { return poset_; }
  std::size_t size() const { return poset_.size(); }
  Kind kind(std::size_t i) const { return kinds_[i]; }
  bool is_free(std::size_t i) const { return kinds_[i] == Kind::Free; }
  const FgGroup& group(std::size_t i) const { return groups_[i]; }
  /// Z x G_i for free i, G_i for regular i.
  FgGroup hat_group(std::size_t i) const;

  /// phi_ji for i < j.
  const GroupHom& map(std::size_t i, std::size_t j) const;
  /// Matrix of the extension Ghat_i -> G_j of phi_ji.
  const IntMatrix& hat(std::size_t i, std::size_t j) const;

  /// Coordinate layout of the ambient vector space: block of Ghat_i at offset(i).
  std::size_t offset(std::size_t i) const { return offsets_[i]; }
  std::size_t block_dim(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
  std::size_t total_dim() const { return offsets_.back(); }
  /// Modulus of each ambient coordinate (0 for n-coordinates and free group coordinates).
  const IntVector& ambient_moduli() const { return ambient_moduli_; }
  /// G_j -> Ghat_j.
  IntVector embed_group(std::size_t j, const IntVector& g) const;

  /// Input-style data with maps on every comparable pair.
  SystemSpec spec() const;
  /// Maps on cover pairs only.
  std::vector<MapSpec> cover_maps() const;

  bool trivial_groups() const;
  bool has_free() const;

 private:
  ISystem() = default;
  friend struct SystemBuilder;

  Poset poset_;
  std::vector<Kind> kinds_;
  std::vector<FgGroup> groups_;
  std::vector<std::optional<GroupHom>> maps_;  // index i * n + j
  std::vector<IntMatrix> hats_;
  std::vector<std::size_t> offsets_;
  IntVector ambient_moduli_;
};

using SystemPtr = std::shared_ptr<const ISystem>;

std::vector<Violation> validate(const SystemSpec& spec);
std::vector<Violation> validate(const ISystem& sys);

/// Elements delta_k of M_k (k < i) with sum_k phi_ik(delta_k) = beta, or nullopt.
/// Free k contribute only with n >= 1; trivial contributions are omitted.
std::optional<std::vector<std::pair<std::size_t, IntVector>>> decompose_below(
    const ISystem& sys, std::size_t i, const IntVector& beta);

/// psi: source.poset -> target.poset with group maps f_i : G_i -> G_psi(i).
struct SystemHom {
  SystemPtr source;
  SystemPtr target;
  std::vector<std::size_t> vertex_map;
  std::vector<IntMatrix> group_maps;
};

std::vector<std::string> hom_violations(const SystemHom& f);
SystemHom identity_hom(const SystemPtr& sys);

/// Throws NotLowerSet.
ISystem restrict_system(const ISystem& sys, const LowerSet& l, std::vector<std::size_t>* map = nullptr);

/// Checks that psi : p1 -> p2 is surjective, order-preserving, strict on chains and cover-bijective.
std::vector<std::string> projection_violations(const Poset& p1, const Poset& p2, const std::vector<std::size_t>& psi);

/// Pulls a system back along psi; throws BadProjection.
std::pair<SystemPtr, SystemHom> pullback(const SystemPtr& target, const Poset& source_poset,
                                         const std::vector<std::size_t>& psi);

/// Disjoint lower sets i1, i2 with a poset isomorphism iso : i1 -> i2 (iso[i] set for i in i1).
struct CompatiblePair {
  SystemPtr system;
  LowerSet i1;
  LowerSet i2;
  std::vector<std::size_t> iso;
};

std::vector<std::string> pair_violations(const CompatiblePair& cp);

struct CrownResult {
  SystemPtr system;                  // on I \ I2 with the crowned order
  std::vector<std::size_t> kept;     // new index -> old index
  std::vector<std::size_t> collapse; // old index -> new index (I2 sent through iso^-1)
  SystemHom projection;
};

/// Throws InvalidPair.
CrownResult crown_system(const CompatiblePair& cp);

/// Same poset and kinds with all groups trivial.
std::pair<SystemPtr, SystemHom> antisymmetrize(const SystemPtr& sys);

/// JSON input; throws ParseError with line or element context.
SystemSpec parse_system_spec(const std::string& text);
ISystem parse_system(const std::string& text);
/// Canonical JSON: sorted ids, order as covers, maps on covers with reduced entries.
std::string serialize_system(const ISystem& sys);

}  // namespace refmon
