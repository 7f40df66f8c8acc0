// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <numeric>

#include "ffsing/duration.hpp"
#include "ffsing/error.hpp"
#include "ffsing/numerics/rng.hpp"

using namespace ffsing;

namespace {

// Literal evaluation of the consonant-scale and adjusted-duration formulas
// in exact integer arithmetic, followed by the documented frame-stealing
// correction.
std::vector<std::size_t> oracle(long dn, const std::vector<long>& raw) {
  const std::size_t n = raw.size();
  if (n == 1) {
    return {static_cast<std::size_t>(dn)};
  }
  const long consonant_sum = std::accumulate(raw.begin() + 1, raw.end(), 0L);
  const long budget = dn - (dn + 1) / 2;  // dn - rint(dn / 2)
  long num = budget;
  long den = consonant_sum;
  if (num >= den) {
    num = 1;
    den = 1;
  }
  std::vector<long> d(n);
  long taken = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const long rounded = (2 * num * raw[i] + den) / (2 * den);  // rint of num*raw/den >= 0
    d[i] = std::max(1L, rounded);
    taken += d[i];
  }
  d[0] = dn - taken;
  while (d[0] < 1) {
    std::size_t pick = 1;
    for (std::size_t i = 1; i < n; ++i) {
      if (d[i] >= d[pick]) {
        pick = i;
      }
    }
    --d[pick];
    ++d[0];
  }
  return {d.begin(), d.end()};
}

std::vector<double> as_real(const std::vector<long>& v) { return {v.begin(), v.end()}; }

const char* kInventory =
    "a vowel\ni vowel\no vowel\nt consonant\nn consonant\ns consonant\nk consonant\nm consonant\nsil silence\n";

DurationTable table() {
  return DurationTable::parse("a 20\ni 18\no 22\nt 6\nn 8\ns 10\nk 7\nm 9\nsil 15\n");
}

}  // namespace

TEST(Rounding, HalfAwayFromZero) {
  EXPECT_EQ(round_half_away(2.5), 3.0);
  EXPECT_EQ(round_half_away(3.5), 4.0);
  EXPECT_EQ(round_half_away(-2.5), -3.0);
  EXPECT_EQ(round_half_away(2.4999), 2.0);
}

TEST(ConsonantScale, WorkedExamples) {
  EXPECT_DOUBLE_EQ(consonant_scale(37, std::vector<double>{12}), 1.0);
  EXPECT_DOUBLE_EQ(consonant_scale(50, std::vector<double>{20, 10, 10}), 1.0);
  EXPECT_DOUBLE_EQ(consonant_scale(10, std::vector<double>{8, 6, 4}), 0.5);
}

TEST(ConsonantScale, MonotoneInNoteLength) {
  num::Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> raw(1 + rng.below(4));
    for (double& r : raw) {
      r = rng.uniform(0.5, 15.0);
    }
    double prev = 0.0;
    for (std::size_t dn = raw.size(); dn < 80; ++dn) {
      const double rc = consonant_scale(dn, raw);
      EXPECT_GE(rc, prev);
      prev = rc;
    }
  }
}

TEST(AdjustDurations, WorkedExamples) {
  EXPECT_EQ(adjust_durations(50, std::vector<double>{20, 10, 10}), (std::vector<std::size_t>{30, 10, 10}));
  EXPECT_EQ(adjust_durations(10, std::vector<double>{8, 6, 4}), (std::vector<std::size_t>{5, 3, 2}));
  EXPECT_EQ(adjust_durations(4, std::vector<double>{10, 8, 8, 8}), (std::vector<std::size_t>{1, 1, 1, 1}));
  EXPECT_EQ(adjust_durations(37, std::vector<double>{12}), (std::vector<std::size_t>{37}));
}

TEST(AdjustDurations, Errors) {
  EXPECT_THROW(adjust_durations(2, std::vector<double>{5, 5, 5}), InsufficientFrames);
  EXPECT_THROW(adjust_durations(5, std::vector<double>{}), InsufficientFrames);
  EXPECT_THROW(adjust_durations(5, std::vector<double>{5, 0}), ValidationError);
}

TEST(AdjustDurations, StealsFromLatestLongestConsonant) {
  // dn=5: budget 2, consonants [3,3] -> r_c = 1/3 -> rint(1)=1 each; vowel 3.
  EXPECT_EQ(adjust_durations(5, std::vector<double>{9, 3, 3}), (std::vector<std::size_t>{3, 1, 1}));
  // dn=4, three consonants of 2 frames raw with r_c = 2/6: each clamps to 1,
  // vowel gets 1.
  EXPECT_EQ(adjust_durations(4, std::vector<double>{9, 2, 2, 2}), (std::vector<std::size_t>{1, 1, 1, 1}));
  // dn=3: budget 1, r_c = 1/20 -> consonants rint(0.5)=1, rint(0.5)=1; vowel 1.
  EXPECT_EQ(adjust_durations(3, std::vector<double>{4, 10, 10}), (std::vector<std::size_t>{1, 1, 1}));
  EXPECT_EQ(oracle(3, {4, 10, 10}), (std::vector<std::size_t>{1, 1, 1}));
}

TEST(AdjustDurations, MatchesExactOracleExhaustively) {
  std::size_t cases = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    std::vector<long> raw(n, 1);
    while (true) {
      for (long dn = static_cast<long>(n); dn <= 20; ++dn) {
        ASSERT_EQ(adjust_durations(static_cast<std::size_t>(dn), as_real(raw)), oracle(dn, raw))
            << "dn=" << dn << " n=" << n;
        ++cases;
      }
      std::size_t k = 0;
      while (k < n && raw[k] == 10) {
        raw[k++] = 1;
      }
      if (k == n) {
        break;
      }
      ++raw[k];
    }
  }
  EXPECT_GT(cases, 100000u);
}

TEST(AdjustDurations, PartitionPropertiesOnRandomNotes) {
  num::Rng rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(6);
    std::vector<double> raw(n);
    for (double& r : raw) {
      r = rng.uniform(0.2, 40.0);
    }
    const std::size_t dn = n + rng.below(120);
    const auto d = adjust_durations(dn, raw);
    ASSERT_EQ(std::accumulate(d.begin(), d.end(), std::size_t{0}), dn);
    ASSERT_GE(*std::min_element(d.begin(), d.end()), 1u);
    if (n > 1 && consonant_scale(dn, raw) < 1.0) {
      const double bound = round_half_away(0.5 * static_cast<double>(dn)) - static_cast<double>(n - 1);
      ASSERT_GE(static_cast<double>(d[0]), bound);
    }
  }
}

TEST(DurationTable, ParseAndCoverage) {
  const DurationTable t = table();
  EXPECT_DOUBLE_EQ(t.mean("n"), 8.0);
  EXPECT_THROW(t.mean("zz"), UnknownPhoneme);
  EXPECT_NO_THROW(t.check_covers(PhonemeInventory::parse(kInventory)));
  EXPECT_THROW(DurationTable::parse("a 1\nt 1\nsil 1\n").check_covers(PhonemeInventory::parse(kInventory)),
               ValidationError);
  EXPECT_THROW(DurationTable::parse("a 0\n"), SyntaxError);
  EXPECT_THROW(DurationTable::parse("a 1\na 2\n"), SyntaxError);
  EXPECT_EQ(DurationTable::parse(t.serialize()).means(), t.means());
}

TEST(ShiftOnsets, MovesOnsetsToPreviousGroup) {
  const auto inv = PhonemeInventory::parse(kInventory);
  const Score s = parse_score(
      "version 1\ninventory x\n"
      "note 10 30 60 t+a+n\n"
      "note 40 30 62 s+k+i\n"
      "note 70 20 R sil\n"
      "note 90 25 64 m+o\n"
      "total 130\n");
  const auto groups = shift_onset_consonants(s, inv);
  ASSERT_EQ(groups.size(), 6u);
  EXPECT_FALSE(groups[0].note_index);
  EXPECT_EQ(groups[0].phonemes, (std::vector<std::string>{"sil", "t"}));
  EXPECT_EQ(groups[0].frames, 10u);
  EXPECT_EQ(groups[1].phonemes, (std::vector<std::string>{"a", "n", "s", "k"}));
  EXPECT_EQ(groups[2].phonemes, (std::vector<std::string>{"i"}));
  EXPECT_EQ(groups[3].phonemes, (std::vector<std::string>{"sil", "m"}));
  EXPECT_EQ(groups[4].phonemes, (std::vector<std::string>{"o"}));
  EXPECT_EQ(*groups[4].note_index, 3u);
  EXPECT_EQ(groups[5].phonemes, (std::vector<std::string>{"sil"}));
  EXPECT_EQ(groups[5].onset_frame, 115u);
  EXPECT_EQ(groups[5].frames, 15u);
}

TEST(ShiftOnsets, OnsetAtFrameZeroIsAnError) {
  const auto inv = PhonemeInventory::parse(kInventory);
  EXPECT_THROW(shift_onset_consonants(parse_score("version 1\ninventory x\nnote 0 20 60 t+a\n"), inv),
               ValidationError);
}

TEST(PlanFromTable, CoversEveryFrame) {
  const auto inv = PhonemeInventory::parse(kInventory);
  const Score s = parse_score(
      "version 1\ninventory x\nnote 12 25 60 t+a+n\nnote 50 40 62 s+i\ntotal 100\n");
  const DurationPlan plan = plan_from_table(s, inv, table());
  EXPECT_EQ(plan.total_frames(), 100u);
  for (const PlannedGroup& g : plan.groups) {
    EXPECT_EQ(std::accumulate(g.durations.begin(), g.durations.end(), std::size_t{0}), g.frames);
  }
  EXPECT_EQ(plan.phonemes(), (std::vector<std::string>{"sil", "t", "a", "n", "sil", "s", "i", "sil"}));
}

TEST(PlanFromTable, RestOnlyScoreIsOneSilenceGroup) {
  const auto inv = PhonemeInventory::parse(kInventory);
  const DurationPlan plan = plan_from_table(parse_score("version 1\ninventory x\nnote 0 30 R sil\n"), inv, table());
  ASSERT_EQ(plan.groups.size(), 1u);
  EXPECT_EQ(plan.groups[0].durations, (std::vector<std::size_t>{30}));
}

TEST(PlanFromTable, InsufficientFramesNamesNote) {
  const auto inv = PhonemeInventory::parse(kInventory);
  const Score s = parse_score("version 1\ninventory x\nnote 10 2 60 a+n+t\n");
  try {
    plan_from_table(s, inv, table());
    FAIL();
  } catch (const InsufficientFrames& e) {
    EXPECT_EQ(*e.note(), 0u);
  }
}

TEST(PlanFromDurations, ChecksRowsAndRoundTripsSidecar) {
  const auto inv = PhonemeInventory::parse(kInventory);
  const Score s = parse_score("version 1\ninventory x\nnote 10 20 60 t+a+n\ntotal 35\n");
  const auto groups = shift_onset_consonants(s, inv);
  const DurationPlan plan = plan_from_durations(groups, {{7, 3}, {15, 5}, {5}});
  EXPECT_EQ(parse_duration_sidecar(serialize_duration_sidecar(plan)),
            (std::vector<std::vector<std::size_t>>{{7, 3}, {15, 5}, {5}}));
  EXPECT_THROW(plan_from_durations(groups, {{7, 3}, {15, 5}}), LengthMismatch);
  EXPECT_THROW(plan_from_durations(groups, {{7, 3}, {16, 5}, {5}}), LengthMismatch);
  EXPECT_THROW(plan_from_durations(groups, {{10, 0}, {15, 5}, {5}}), LengthMismatch);
  EXPECT_THROW(plan_from_durations(groups, {{10}, {15, 5}, {5}}), LengthMismatch);
  EXPECT_THROW(parse_duration_sidecar("1 2 x\n"), SyntaxError);
}
