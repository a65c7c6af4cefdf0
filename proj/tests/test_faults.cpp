#include <cmath>

#include <gtest/gtest.h>

#include "treecam/faults.hpp"
#include "treecam/simulator.hpp"

using namespace treecam;

namespace {

TileSet small_array() {
  TernaryLUT lut;
  lut.rows = {"0011x", "1x001", "xxxxx"};
  lut.classes = {0, 1, 0};
  lut.class_labels = {0, 1};
  lut.segment_widths = {5};
  return map_lut(lut, 8);
}

}  // namespace

TEST(Faults, ZeroRatesAreIdentity) {
  const auto ts = small_array();
  EXPECT_EQ(inject_saf(ts, {.seed = 3}), ts);
  const auto off = sample_sa_offsets(ts.geometry(), 0.0, 1);
  for (const auto& d : off)
    for (double o : d) EXPECT_EQ(o, 0.0);
  Dataset d;
  d.rows = {{0.1, 0.2}};
  d.labels = {0};
  EXPECT_EQ(perturb_inputs(d, 0.0, 5).rows, d.rows);
}

TEST(Faults, StuckHrsOnLrsDeviceGivesDontCare) {
  // A '0' cell stores {HRS, LRS}; its second device stuck at HRS leaves {HRS, HRS}.
  TcamCell c = TcamCell::from_symbol('0');
  c.second = Device::kHRS;
  EXPECT_EQ(c.symbol(), 'x');
  c = TcamCell::from_symbol('1');
  c.second = Device::kLRS;
  EXPECT_EQ(c.symbol(), '!');
}

TEST(Faults, AllStuckLrsKillsEveryRow) {
  const auto ts = small_array();
  const auto faulty = inject_saf(ts, {.p_sa1 = 1.0, .seed = 1});
  const auto& g = ts.geometry();
  for (std::size_t r = 0; r < g.physical_rows(); ++r)
    for (std::size_t c = 0; c < g.physical_columns(); ++c) {
      if (ts.cell(r, c).masked)
        EXPECT_TRUE(faulty.cell(r, c).masked);  // masked cells are untouched
      else
        EXPECT_EQ(faulty.cell(r, c).symbol(), '!');
    }
  const auto res = simulate_input(faulty, "00110", {});
  EXPECT_EQ(res.anomaly, Anomaly::kNoSurvivor);
  EXPECT_EQ(res.predicted, kNoClass);
}

TEST(Faults, AllStuckHrsMakesEverythingDontCare) {
  const auto faulty = inject_saf(small_array(), {.p_sa0 = 1.0, .seed = 1});
  for (std::size_t c = 0; c < 6; ++c) EXPECT_EQ(faulty.cell(0, c).symbol(), 'x');
}

TEST(Faults, FaultRateIsHonoured) {
  TernaryLUT lut;
  lut.rows.assign(256, std::string(255, '0'));
  lut.classes.assign(256, 0);
  lut.class_labels = {0};
  lut.segment_widths = {255};
  const auto ts = map_lut(lut, 256);
  const auto faulty = inject_saf(ts, {.p_sa0 = 0.05, .p_sa1 = 0.05, .seed = 11});
  std::size_t devices = 0, changed = 0;
  for (std::size_t r = 0; r < 256; ++r)
    for (std::size_t c = 1; c < 256; ++c) {
      devices += 2;
      // '0' is {HRS, LRS}: only SA1 on the first or SA0 on the second changes it.
      changed += faulty.cell(r, c).first != ts.cell(r, c).first;
      changed += faulty.cell(r, c).second != ts.cell(r, c).second;
    }
  EXPECT_NEAR(static_cast<double>(changed) / static_cast<double>(devices), 0.05, 0.003);
}

TEST(Faults, OffsetSpreadMatchesSigma) {
  const auto g = plan_tiles(1, 20000, 2, 2);  // one SA per row
  const auto off = sample_sa_offsets(g, 0.1, 42);
  double sum = 0, sq = 0;
  std::size_t n = 0;
  for (const auto& d : off)
    for (double o : d) {
      sum += o;
      sq += o * o;
      ++n;
    }
  ASSERT_GE(n, 10000u);
  const double mean = sum / static_cast<double>(n);
  const double sd = std::sqrt(sq / static_cast<double>(n) - mean * mean);
  EXPECT_NEAR(sd, 0.1, 0.005);
  EXPECT_EQ(sample_sa_offsets(g, 0.1, 42), off);
}

TEST(Faults, InputNoiseDeterministicAndEffective) {
  Dataset d;
  for (int i = 0; i < 200; ++i) {
    d.rows.push_back({0.5, 0.5});
    d.labels.push_back(0);
  }
  const auto a = perturb_inputs(d, 0.1, 9);
  EXPECT_EQ(a.rows, perturb_inputs(d, 0.1, 9).rows);
  EXPECT_NE(a.rows, perturb_inputs(d, 0.1, 10).rows);
  // Noise moves some inputs across a threshold sitting at the clean value.
  FeatureCodes fc{{0.5}};
  std::size_t flips = 0;
  for (const auto& r : a.rows) flips += fc.range_of(r[0]) != fc.range_of(0.5);
  EXPECT_GT(flips, 0u);
  // No clamping to [0,1].
  Dataset edge = d;
  for (auto& r : edge.rows) r = {1.0, 0.0};
  const auto b = perturb_inputs(edge, 0.1, 3);
  bool outside = false;
  for (const auto& r : b.rows) outside = outside || r[0] > 1.0 || r[1] < 0.0;
  EXPECT_TRUE(outside);
}

TEST(Faults, RejectsBadConfig) {
  EXPECT_THROW((FaultConfig{.p_sa0 = 0.7, .p_sa1 = 0.7}.validate()), InputError);
  EXPECT_THROW(FaultConfig{.p_sa0 = -0.1}.validate(), InputError);
  EXPECT_THROW(FaultConfig{.sigma_sa = -1}.validate(), InputError);
}
