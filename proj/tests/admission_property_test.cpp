#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "softqos/admission.hpp"
#include "softqos/scenario.hpp"

namespace softqos {
namespace {

using testing::Rng;

constexpr double kTol = 1e-9;

void expect_floors_respected(const CellState& cell) {
  for (const auto& call : cell.calls()) {
    const auto& cls = cell.traffic_class(call.class_id);
    EXPECT_GE(call.ratio, cls.xi_min - kTol) << "call " << call.call_id;
    EXPECT_LE(call.ratio, 1.0 + kTol) << "call " << call.call_id;
  }
}

TEST(AdmissionPropertyTest, BandwidthSumsMatchEnumerationOnGrid) {
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    auto [cell, numbers] = testing::random_grid_cell(rng, 4);
    EXPECT_NEAR(occupied_bandwidth(cell), testing::sum_occupied(numbers), kTol);
    EXPECT_NEAR(releasable_bandwidth(cell, CallKind::Handoff),
                testing::enumerate_max_release(numbers, true), kTol);
    EXPECT_NEAR(releasable_bandwidth(cell, CallKind::New),
                testing::enumerate_max_release(numbers, false), kTol);
  }
}

TEST(AdmissionPropertyTest, HandoffReleasesAtLeastAsMuchAsNew) {
  Rng rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    const auto grid = testing::random_grid_cell(rng, 8);
    EXPECT_GE(releasable_bandwidth(grid.cell, CallKind::Handoff) + kTol,
              releasable_bandwidth(grid.cell, CallKind::New));
  }
}

TEST(AdmissionPropertyTest, CallOrderDoesNotChangeResults) {
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto grid = testing::random_grid_cell(rng, 6);
    std::vector<ActiveCall> shuffled(grid.cell.calls().begin(), grid.cell.calls().end());
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const CellState permuted(grid.cell.capacity(), standard_classes(), shuffled);

    const auto kind = testing::random_kind(rng);
    const auto request = CallRequest{1000, testing::uniform_int(rng, 1, 4), kind, 0.0,
                                     kInfiniteTime};
    const auto a = soft_admit(grid.cell, request);
    const auto b = soft_admit(permuted, request);
    ASSERT_EQ(a.decision.outcome, b.decision.outcome);
    EXPECT_NEAR(a.decision.released, b.decision.released, kTol);
    for (const auto& call : a.cell.calls()) {
      EXPECT_NEAR(call.ratio, b.cell.find_call(call.call_id)->ratio, kTol);
    }
  }
}

TEST(AdmissionPropertyTest, HardAcceptImpliesSoftAccept) {
  Rng rng(4);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto grid = testing::random_grid_cell(rng, 6);
    const auto request = CallRequest{1000, testing::uniform_int(rng, 1, 4),
                                     testing::random_kind(rng), 0.0, kInfiniteTime};
    if (hard_admit(grid.cell, request).decision.accepted()) {
      EXPECT_TRUE(soft_admit(grid.cell, request).decision.accepted());
      EXPECT_TRUE(soft_admit(grid.cell, request, AdmissionMode::Elastic).decision.accepted());
    }
  }
}

TEST(AdmissionPropertyTest, StrictSqueezeReleasesExactlyTheShortfall) {
  Rng rng(5);
  int squeezed = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const auto grid = testing::random_grid_cell(rng, 6);
    const auto request = CallRequest{1000, testing::uniform_int(rng, 1, 4),
                                     testing::random_kind(rng), 0.0, kInfiniteTime};
    const double need = grid.cell.traffic_class(request.class_id).requested_bandwidth;
    const double free_before = free_bandwidth(grid.cell);
    const auto [after, decision] = soft_admit(grid.cell, request);
    if (decision.accepted() && decision.released > 0.0) {
      ++squeezed;
      EXPECT_NEAR(decision.released, need - free_before, kTol);
      EXPECT_NEAR(free_bandwidth(after), 0.0, kTol);
    }
    expect_floors_respected(after);
    EXPECT_LE(occupied_bandwidth(after), after.capacity() + kTol);
  }
  EXPECT_GT(squeezed, 50);
}

TEST(AdmissionPropertyTest, DegradeThenRestoreRoundTrips) {
  Rng rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    auto grid = testing::random_grid_cell(rng, 6);
    // Start from full ratios so proportional squeeze and refill are exact inverses.
    std::vector<ActiveCall> full(grid.cell.calls().begin(), grid.cell.calls().end());
    double occupied = 0.0;
    for (auto& c : full) {
      c.ratio = 1.0;
      occupied += grid.cell.traffic_class(c.class_id).requested_bandwidth;
    }
    const CellState cell(occupied + 1.0, standard_classes(), full);
    const auto kind = testing::random_kind(rng);
    const double amount =
        releasable_bandwidth(cell, kind) * testing::uniform_real(rng, 0.0, 1.0);
    const auto squeezed = degrade(cell, amount, kind);
    EXPECT_NEAR(squeezed.released, amount, kTol);
    expect_floors_respected(squeezed.cell);
    const auto restored = restore(squeezed.cell, amount);
    EXPECT_NEAR(restored.granted, amount, kTol);
    for (const auto& c : restored.cell.calls()) {
      EXPECT_NEAR(c.ratio, 1.0, kTol);
    }
  }
}

TEST(AdmissionPropertyTest, ConversationalCallsNeverMove) {
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    auto grid = testing::random_grid_cell(rng, 6);
    auto cell = std::move(grid.cell);
    for (CallId id = 100; id < 110; ++id) {
      const auto request = CallRequest{id, testing::uniform_int(rng, 1, 4),
                                       testing::random_kind(rng), 0.0, kInfiniteTime};
      cell = soft_admit(std::move(cell), request).cell;
    }
    for (const auto& call : cell.calls()) {
      if (call.class_id == 1) {
        EXPECT_EQ(call.ratio, 1.0);
      }
    }
  }
}

}  // namespace
}  // namespace softqos
