#include "cycip/control.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "cycip/random.hpp"

namespace cycip {

ControlSchedule::ControlSchedule(ControlKind kind, std::size_t index_count,
                                 std::uint64_t seed, std::vector<std::size_t> sequence)
    : kind_(kind), index_count_(index_count), seed_(seed), sequence_(std::move(sequence)) {
  if (index_count_ == 0) throw std::invalid_argument("control needs at least one index");
  for (std::size_t i : sequence_)
    if (i >= index_count_)
      throw std::invalid_argument("control index " + std::to_string(i) + " out of range");
}

ControlSchedule ControlSchedule::cyclic(std::size_t index_count) {
  std::vector<std::size_t> order(index_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return cyclic(std::move(order));
}

ControlSchedule ControlSchedule::cyclic(std::vector<std::size_t> order) {
  std::vector<std::size_t> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != i) throw std::invalid_argument("cyclic order must be a permutation");
  const std::size_t m = order.size();
  return ControlSchedule(ControlKind::cyclic, m, 0, std::move(order));
}

ControlSchedule ControlSchedule::random_blocks(std::size_t index_count, std::uint64_t seed) {
  return ControlSchedule(ControlKind::random_permutation_blocks, index_count, seed, {});
}

ControlSchedule ControlSchedule::explicit_sequence(std::size_t index_count,
                                                   std::vector<std::size_t> sequence) {
  if (sequence.empty()) throw std::invalid_argument("explicit control needs a nonempty buffer");
  return ControlSchedule(ControlKind::explicit_sequence, index_count, 0, std::move(sequence));
}

std::vector<std::size_t> ControlSchedule::block_permutation(std::uint64_t block) const {
  std::vector<std::size_t> perm(index_count_);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  SplitMix64 rng(derive_seed(seed_, block));
  rng.shuffle(std::span<std::size_t>(perm));
  return perm;
}

std::size_t ControlSchedule::next_index(std::uint64_t k) const {
  switch (kind_) {
    case ControlKind::cyclic:
    case ControlKind::explicit_sequence:
      return sequence_[k % sequence_.size()];
    case ControlKind::random_permutation_blocks:
      return block_permutation(k / index_count_)[k % index_count_];
  }
  return 0;
}

ControlCursor::ControlCursor(const ControlSchedule& schedule) : schedule_(&schedule) {}

std::size_t ControlCursor::next() {
  const std::uint64_t k = k_++;
  if (schedule_->kind() != ControlKind::random_permutation_blocks)
    return schedule_->sequence()[k % schedule_->sequence().size()];
  const std::size_t m = schedule_->index_count();
  const std::uint64_t block = k / m;
  if (block != block_) {
    perm_ = schedule_->block_permutation(block);
    block_ = block;
  }
  return perm_[k % m];
}

QuasicyclicViolation::QuasicyclicViolation(std::uint64_t first_k, std::size_t quasiperiod)
    : std::runtime_error("control is not quasicyclic with quasiperiod " +
                         std::to_string(quasiperiod) + ": window starting at k=" +
                         std::to_string(first_k) + " misses an index"),
      first_k_(first_k) {}

QuasiperiodCertificate validate_quasicyclic(const ControlSchedule& schedule,
                                            std::size_t quasiperiod,
                                            std::uint64_t horizon) {
  if (quasiperiod == 0) throw std::invalid_argument("quasiperiod must be >= 1");
  if (horizon < quasiperiod) throw std::invalid_argument("horizon must be >= quasiperiod");
  const std::size_t m = schedule.index_count();

  // Sliding window of counts over i(k), …, i(k+M−1).
  ControlCursor cursor(schedule);
  std::vector<std::size_t> window;
  window.reserve(horizon + 1);
  for (std::uint64_t k = 0; k <= horizon; ++k) window.push_back(cursor.next());

  std::vector<std::size_t> count(m, 0);
  std::size_t covered = 0;
  for (std::size_t k = 0; k < quasiperiod; ++k)
    if (count[window[k]]++ == 0) ++covered;
  for (std::uint64_t k = 0;; ++k) {
    if (covered != m) throw QuasicyclicViolation(k, quasiperiod);
    if (k + quasiperiod > horizon) break;
    if (--count[window[k]] == 0) --covered;
    if (count[window[k + quasiperiod]]++ == 0) ++covered;
  }
  return {quasiperiod, horizon};
}

bool visits_every_index(const ControlSchedule& schedule, std::uint64_t horizon) {
  std::vector<bool> seen(schedule.index_count(), false);
  std::size_t missing = schedule.index_count();
  ControlCursor cursor(schedule);
  for (std::uint64_t k = 0; k <= horizon && missing > 0; ++k) {
    const std::size_t i = cursor.next();
    if (!seen[i]) {
      seen[i] = true;
      --missing;
    }
  }
  return missing == 0;
}

}  // namespace cycip
