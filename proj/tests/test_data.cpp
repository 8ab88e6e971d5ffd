#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace rdsurv;

namespace {

Unit unit(double y, bool d, double z, std::vector<double> x = {0.1}) {
  Unit u;
  u.y = y;
  u.delta = d;
  u.z = z;
  u.x = std::move(x);
  return u;
}

std::vector<Unit> four_units() {
  return {unit(1, true, 0.1), unit(2, false, 0.2), unit(3, true, 0.7), unit(2, true, 0.9)};
}

template <class Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

} // namespace

TEST(TimeGrid, IndexingAndFloor) {
  const TimeGrid g({1.0, 2.5, 4.0});
  EXPECT_EQ(g.size(), 3u);
  EXPECT_EQ(g.time(0), 0.0);
  EXPECT_EQ(g.time(2), 2.5);
  EXPECT_EQ(g.floor_index(0.5), 0u);
  EXPECT_EQ(g.floor_index(2.5), 2u);
  EXPECT_EQ(g.floor_index(3.9), 2u);
  EXPECT_EQ(g.floor_index(100.0), 3u);
  EXPECT_EQ(g.index_of(4.0), 3u);
  EXPECT_THROW(g.index_of(3.0), Error);
  EXPECT_THROW(TimeGrid({2.0, 1.0}), Error);
  EXPECT_THROW(TimeGrid({1.0, 1.0}), Error);
}

TEST(Dataset, BuildsGridAndIndices) {
  const auto ds = SurvivalDataset::create(four_units(), 0.5, Design::Sharp);
  EXPECT_EQ(ds.size(), 4u);
  EXPECT_EQ(ds.grid().size(), 3u);
  EXPECT_EQ(ds.time_index(0), 1u);
  EXPECT_EQ(ds.time_index(1), 2u);
  EXPECT_EQ(ds.time_index(3), 2u);
  EXPECT_EQ(ds.censored_count(), 1u);
  EXPECT_FALSE(ds.treated(0));
  EXPECT_TRUE(ds.treated(2));
  EXPECT_EQ(ds.covariate_names(), std::vector<std::string>{"x1"});
}

TEST(Dataset, RejectsInvalidRows) {
  auto units = four_units();
  units[2].y = std::nan("");
  try {
    SurvivalDataset::create(units, 0.5, Design::Sharp);
    FAIL();
  } catch (const RowError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteValue);
    EXPECT_EQ(e.row(), 2u);
  }
  units = four_units();
  units[1].y = -1.0;
  EXPECT_EQ(code_of([&] { SurvivalDataset::create(units, 0.5, Design::Sharp); }), ErrorCode::InvalidValue);
  units = four_units();
  units[3].x.push_back(1.0);
  EXPECT_EQ(code_of([&] { SurvivalDataset::create(units, 0.5, Design::Sharp); }), ErrorCode::InvalidValue);
  EXPECT_EQ(code_of([&] { SurvivalDataset::create(four_units(), 0.5, Design::Fuzzy); }),
            ErrorCode::MissingTreatmentColumn);
  EXPECT_EQ(code_of([&] { SurvivalDataset::create(four_units(), 0.15, Design::Sharp); }), ErrorCode::EmptySide);
}

TEST(Dataset, BinWidthCoarsensUpward) {
  auto units = four_units();
  units[0].y = 0.3;
  units[1].y = 1.01;
  DatasetOptions opt;
  opt.bin_width = 0.5;
  const auto ds = SurvivalDataset::create(units, 0.5, Design::Sharp, opt);
  EXPECT_DOUBLE_EQ(ds.unit(0).y, 0.5);
  EXPECT_DOUBLE_EQ(ds.unit(1).y, 1.5);
  EXPECT_DOUBLE_EQ(ds.unit(2).y, 3.0);
}

TEST(Csv, ParsesAndValidates) {
  std::istringstream in("\xEF\xBB\xBFtime, event ,z,x1,x2\n1,1,0.1,0.5,2\n\n2,0,0.2,0.5,3\n3,1,0.8,NA,1\n");
  const RawTable t = parse_csv(in);
  ASSERT_EQ(t.columns.size(), 5u);
  EXPECT_EQ(t.columns[1], "event");
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_TRUE(std::isnan(t.rows[2][3]));
  try {
    validate_dataset(t, 0.5, Design::Sharp);
    FAIL();
  } catch (const RowError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteValue);
    EXPECT_EQ(e.row(), 2u);
  }
}

TEST(Csv, FieldCountMismatchIsRowError) {
  std::istringstream in("time,event,z\n1,1,0.1\n2,0\n");
  try {
    parse_csv(in);
    FAIL();
  } catch (const RowError& e) {
    EXPECT_EQ(e.row(), 1u);
  }
}

TEST(Csv, MissingColumnsAreReported) {
  std::istringstream in("time,z,x1\n1,0.1,0\n");
  EXPECT_EQ(code_of([&] { validate_dataset(parse_csv(in), 0.5, Design::Sharp); }), ErrorCode::MissingColumn);
  std::istringstream in2("time,event,z,x1\n1,1,0.1,0\n2,1,0.2,0\n3,1,0.7,0\n4,1,0.8,0\n");
  EXPECT_EQ(code_of([&] { validate_dataset(parse_csv(in2), 0.5, Design::Fuzzy); }),
            ErrorCode::MissingTreatmentColumn);
  std::istringstream in3("time,event,z\n1,2,0.1\n");
  EXPECT_EQ(code_of([&] { validate_dataset(parse_csv(in3), 0.5, Design::Sharp); }), ErrorCode::InvalidValue);
}

TEST(Csv, RoundTrip) {
  const auto ds = testing_support::random_dataset(3, 60, 2, 0.3, 9, Design::Fuzzy);
  std::stringstream ss;
  write_dataset_csv(ss, ds);
  const auto back = validate_dataset(parse_csv(ss), 0.5, Design::Fuzzy);
  ASSERT_EQ(back.size(), ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(back.unit(i).y, ds.unit(i).y);
    EXPECT_EQ(back.unit(i).delta, ds.unit(i).delta);
    EXPECT_EQ(back.unit(i).z, ds.unit(i).z);
    EXPECT_EQ(back.unit(i).x, ds.unit(i).x);
    EXPECT_EQ(back.treated(i), ds.treated(i));
  }
}

TEST(Horizon, SnapsAndValidates) {
  const auto ds = SurvivalDataset::create(four_units(), 0.5, Design::Sharp);
  const Horizon hz = make_horizon(ds, 2.5);
  EXPECT_EQ(hz.grid_index, 2u);
  EXPECT_TRUE(hz.snapped);
  EXPECT_FALSE(make_horizon(ds, 2.0).snapped);
  EXPECT_EQ(code_of([&] { make_horizon(ds, 0.0); }), ErrorCode::InvalidHorizon);
  EXPECT_EQ(code_of([&] { make_horizon(ds, 3.5); }), ErrorCode::InvalidHorizon);
  EXPECT_EQ(code_of([&] { make_horizon(ds, 0.5); }), ErrorCode::InvalidHorizon);
}

TEST(Horizon, AllCensoredBeforeHorizonIsInvalid) {
  std::vector<Unit> units{unit(1, false, 0.1), unit(2, false, 0.2), unit(3, false, 0.7), unit(2, false, 0.9)};
  const auto ds = SurvivalDataset::create(units, 0.5, Design::Sharp);
  EXPECT_EQ(code_of([&] { make_horizon(ds, 3.0); }), ErrorCode::InvalidHorizon);
}

TEST(Horizon, RemapProperties) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto ds = testing_support::random_dataset(seed, 80);
    std::mt19937_64 rng(seed);
    const double h = std::uniform_real_distribution<double>(1.0, ds.grid().max_time())(rng);
    const Horizon hz = make_horizon(ds, h);
    const auto st = remap_to_horizon(ds, hz);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const Unit& u = ds.unit(i);
      EXPECT_LE(st[i].time, h);
      EXPECT_EQ(st[i].time, std::min(u.y, h));
      EXPECT_EQ(st[i].observed, u.delta || u.y > h);
      EXPECT_LE(st[i].grid_index, hz.grid_index);
      EXPECT_LE(ds.grid().time(st[i].grid_index), st[i].time);
    }
  }
}
