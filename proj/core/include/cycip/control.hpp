#pragma once

// Index selector maps k ↦ i(k) for the iteration driver.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cycip {

enum class ControlKind { cyclic, random_permutation_blocks, explicit_sequence };

/// Immutable description of a control over I = {0, …, m−1}.
///
/// - cyclic: order[k mod m]
/// - random_permutation_blocks: entries mk … mk+m−1 are a permutation of I,
///   drawn for block b by seeding SplitMix64 with derive_seed(seed, b) and
///   shuffling the identity with SplitMix64::shuffle
/// - explicit_sequence: a finite buffer repeated forever
class ControlSchedule {
 public:
  static ControlSchedule cyclic(std::size_t index_count);
  static ControlSchedule cyclic(std::vector<std::size_t> order);
  static ControlSchedule random_blocks(std::size_t index_count, std::uint64_t seed);
  static ControlSchedule explicit_sequence(std::size_t index_count,
                                           std::vector<std::size_t> sequence);

  ControlKind kind() const { return kind_; }
  std::size_t index_count() const { return index_count_; }
  std::uint64_t seed() const { return seed_; }
  /// Cyclic order or explicit buffer; empty for random blocks.
  const std::vector<std::size_t>& sequence() const { return sequence_; }

  std::size_t next_index(std::uint64_t k) const;
  /// Permutation used for block b of a random-blocks schedule.
  std::vector<std::size_t> block_permutation(std::uint64_t block) const;

 private:
  ControlSchedule(ControlKind kind, std::size_t index_count, std::uint64_t seed,
                  std::vector<std::size_t> sequence);

  ControlKind kind_;
  std::size_t index_count_;
  std::uint64_t seed_;
  std::vector<std::size_t> sequence_;
};

/// Sequential reader of a schedule; caches the current permutation block so
/// stepping costs O(1) amortized.
class ControlCursor {
 public:
  explicit ControlCursor(const ControlSchedule& schedule);

  std::size_t next();
  std::uint64_t position() const { return k_; }

 private:
  const ControlSchedule* schedule_;
  std::uint64_t k_ = 0;
  std::uint64_t block_ = UINT64_MAX;
  std::vector<std::size_t> perm_;
};

struct QuasiperiodCertificate {
  std::size_t quasiperiod;
  std::uint64_t horizon;
};

class QuasicyclicViolation : public std::runtime_error {
 public:
  QuasicyclicViolation(std::uint64_t first_k, std::size_t quasiperiod);
  std::uint64_t first_offending_k() const { return first_k_; }

 private:
  std::uint64_t first_k_;
};

/// Certifies that every window i(k), …, i(k+M−1) with k+M−1 ≤ horizon covers
/// all of I. Throws QuasicyclicViolation naming the first bad k.
QuasiperiodCertificate validate_quasicyclic(const ControlSchedule& schedule,
                                            std::size_t quasiperiod,
                                            std::uint64_t horizon);

/// True iff every index occurs in i(0), …, i(horizon).
bool visits_every_index(const ControlSchedule& schedule, std::uint64_t horizon);

}  // namespace cycip
