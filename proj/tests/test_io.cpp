#include <gtest/gtest.h>

#include <sstream>

#include "greyahp/io.hpp"
#include "test_support.hpp"

using namespace greyahp;
using greyahp::testing::kCriteria;

namespace {

const std::string kData = GREYAHP_DATA_DIR;

Error error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error raised";
  return Error(ErrorCode::InvalidArgument, "none");
}

io::DirectionMap all_benefit() {
  io::DirectionMap d;
  for (const auto& c : kCriteria) d[c] = Direction::Benefit;
  return d;
}

}  // namespace

TEST(Parse, Numbers) {
  EXPECT_EQ(io::parse_double(" 2.5 "), 2.5);
  EXPECT_FALSE(io::parse_double("2.5x"));
  EXPECT_FALSE(io::parse_double(""));
  EXPECT_EQ(io::parse_judgment("1/3"), 1.0 / 3.0);
  EXPECT_FALSE(io::parse_judgment("1/0"));
  EXPECT_EQ(io::format_fixed(0.5), "0.500000000");
  EXPECT_EQ(io::format_fixed(-1e-12), "0.000000000");
}

TEST(SeriesFile, LoadsShippedSample) {
  const auto s = io::load_series(kData + "/series_synthetic.csv");
  ASSERT_EQ(s.size(), 10u);
  EXPECT_EQ(s[0], 31000.0);
  EXPECT_EQ(s.periods.front(), "2015-01");
  EXPECT_EQ(s.t0_label, "2015-01");
}

TEST(SeriesFile, NonPositiveValueNamesLine) {
  std::istringstream in("period,value\n1,10\n# note\n2,-3\n");
  const auto e = error_of([&] { io::parse_series(in, "s.csv"); });
  EXPECT_EQ(e.code(), ErrorCode::NonPositiveValue);
  EXPECT_NE(std::string(e.what()).find("s.csv:4"), std::string::npos) << e.what();
}

TEST(SeriesFile, MalformedRowsAreParseErrors) {
  std::istringstream bad("period,value\n1,ten\n");
  EXPECT_EQ(error_of([&] { io::parse_series(bad); }).code(), ErrorCode::ParseError);
  std::istringstream headerless("1,10\n2,20\n");
  // A two-column first row is taken as the header; the data must still parse.
  EXPECT_EQ(io::parse_series(headerless).size(), 1u);
  std::istringstream wide("period,value,extra\n");
  EXPECT_EQ(error_of([&] { io::parse_series(wide); }).code(), ErrorCode::ParseError);
}

TEST(SeriesFile, ThreeRowsLoadButCannotBeFitted) {
  std::istringstream in("period,value\n1,10\n2,20\n3,30\n");
  const auto s = io::parse_series(in);
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(error_of([&] { fit_grey_verhulst(s); }).code(), ErrorCode::SeriesTooShort);
}

TEST(MatrixFile, ShippedFileIsTheReferenceMatrix) {
  std::vector<std::string> repairs;
  const auto m = io::load_matrix(kData + "/matrix_reference.csv", &repairs);
  EXPECT_EQ(m, greyahp::testing::reference_matrix());
  EXPECT_TRUE(repairs.empty());
}

TEST(MatrixFile, ReciprocityIsCheckedAndRepaired) {
  std::istringstream bad("criterion,a,b\na,1,3\nb,0.34,1\n");
  EXPECT_EQ(error_of([&] { io::parse_matrix(bad); }).code(), ErrorCode::ReciprocityViolation);

  std::vector<std::string> repairs;
  std::istringstream close("criterion,a,b\na,1,3\nb,0.3333333,1\n");
  const auto m = io::parse_matrix(close, "<m>", &repairs);
  EXPECT_EQ(m(1, 0), 1.0 / 3.0);
  EXPECT_EQ(repairs.size(), 1u);
}

TEST(MatrixFile, ShapeAndScaleErrors) {
  std::istringstream three_by_four("criterion,a,b,c,d\na,1,1,1,1\nb,1,1,1,1\nc,1,1,1,1\n");
  EXPECT_EQ(error_of([&] { io::parse_matrix(three_by_four); }).code(), ErrorCode::NotSquare);
  std::istringstream short_row("criterion,a,b\na,1,2\nb,1/2\n");
  EXPECT_EQ(error_of([&] { io::parse_matrix(short_row); }).code(), ErrorCode::NotSquare);
  std::istringstream label("criterion,a,b\na,1,2\nc,1/2,1\n");
  EXPECT_EQ(error_of([&] { io::parse_matrix(label); }).code(), ErrorCode::ParseError);
  std::istringstream scale("criterion,a,b\na,1,12\nb,1/12,1\n");
  EXPECT_EQ(error_of([&] { io::parse_matrix(scale); }).code(), ErrorCode::OutOfScale);
}

TEST(IndicatorFile, ReferenceRowsLoadExactly) {
  const auto t = io::load_indicators(kData + "/indicators_reference_rows.csv", all_benefit());
  EXPECT_EQ(t.entities, (std::vector<std::string>{"Ireland", "Estonia", "Austria"}));
  EXPECT_EQ(t.criteria.front(), "gdp");
  EXPECT_EQ(t.at(0, *t.criterion_index("gdp")), 0.491458621);
  EXPECT_EQ(t.at(0, *t.criterion_index("land_area_per_capita")), 0.061869);
  EXPECT_EQ(t.at(0, *t.criterion_index("unemployment_rate")), 0.41602317);
  EXPECT_EQ(t.at(0, *t.criterion_index("public_welfare_index")), 0.928571429);
}

TEST(IndicatorFile, MissingCellAndUnknownCriterion) {
  std::istringstream missing("entity,x,y\na,1,\nb,2,3\n");
  const auto e = error_of([&] { io::parse_indicators(missing, {{"x", Direction::Benefit}, {"y", Direction::Cost}}); });
  EXPECT_EQ(e.code(), ErrorCode::MissingCell);
  std::istringstream ok("entity,x,y\na,1,2\n");
  EXPECT_EQ(error_of([&] { io::parse_indicators(ok, {{"x", Direction::Benefit}}); }).code(),
            ErrorCode::UnknownCriterion);
  std::istringstream ok2("entity,x,y\na,1,2\n");
  EXPECT_EQ(error_of([&] {
              io::parse_indicators(ok2, {{"x", Direction::Benefit}, {"y", Direction::Cost}, {"z", Direction::Cost}});
            }).code(),
            ErrorCode::UnknownCriterion);
  std::istringstream dup("entity,x\na,1\na,2\n");
  EXPECT_EQ(error_of([&] { io::parse_indicators(dup, {{"x", Direction::Benefit}}); }).code(),
            ErrorCode::ParseError);
}

TEST(RoundTrip, CanonicalFormsAreIdempotent) {
  const auto m = io::load_matrix(kData + "/matrix_reference.csv");
  const std::string m1 = io::save_matrix(m);
  std::istringstream min(m1);
  EXPECT_EQ(io::save_matrix(io::parse_matrix(min)), m1);

  const auto s = io::load_series(kData + "/series_synthetic.csv");
  const std::string s1 = io::save_series(s);
  std::istringstream sin(s1);
  EXPECT_EQ(io::save_series(io::parse_series(sin)), s1);

  const auto cfg = io::load_project(kData + "/project.conf");
  const auto t = io::load_indicators(cfg.indicators, cfg.directions);
  const std::string t1 = io::save_indicators(t);
  std::istringstream tin(t1);
  const auto reloaded = io::parse_indicators(tin, cfg.directions);
  EXPECT_EQ(io::save_indicators(reloaded), t1);
  EXPECT_EQ(reloaded, t);
}

TEST(RoundTrip, ProjectConfig) {
  const auto cfg = io::load_project(kData + "/project.conf");
  EXPECT_EQ(cfg.inflows, (std::vector<double>{400000, 400000, 300000, 200000, 100000}));
  EXPECT_EQ(cfg.directions.at("unemployment_rate"), Direction::Cost);
  EXPECT_EQ(cfg.gamma.at("land_area_per_capita"), -5e-9);
  EXPECT_EQ(cfg.matrix, std::filesystem::path(kData) / "matrix_reference.csv");

  const std::string text = io::save_key_values(io::to_key_values(cfg));
  std::istringstream in(text);
  const auto again = io::parse_project(io::parse_key_values(in));
  EXPECT_EQ(io::save_key_values(io::to_key_values(again)), text);
  EXPECT_EQ(again.ahp_tol, 1e-12);
  EXPECT_EQ(again.gamma, cfg.gamma);
  EXPECT_EQ(again.inflows, cfg.inflows);
}

TEST(ProjectConfig, RejectsUnknownKeysAndHorizonMismatch) {
  std::istringstream unknown("series=a.csv\nforecats.model=verhulst\n");
  EXPECT_EQ(error_of([&] { io::parse_project(io::parse_key_values(unknown)); }).code(), ErrorCode::ParseError);
  std::istringstream dup("series=a.csv\nseries=b.csv\n");
  EXPECT_EQ(error_of([&] { io::parse_key_values(dup); }).code(), ErrorCode::ParseError);
  std::istringstream horizon("simulate.inflows=1,2,3\nsimulate.horizon=4\n");
  EXPECT_EQ(error_of([&] { io::parse_project(io::parse_key_values(horizon)); }).code(), ErrorCode::ParseError);
}

TEST(ProjectConfig, FeedbackConfigFollowsTableColumns) {
  const auto cfg = io::load_project(kData + "/project.conf");
  const auto t = io::load_indicators(cfg.indicators, cfg.directions);
  const auto fb = io::feedback_config(cfg, t);
  EXPECT_EQ(fb.horizon, 5u);
  ASSERT_EQ(fb.gamma.size(), t.cols());
  EXPECT_EQ(fb.gamma[*t.criterion_index("gdp")], 0.0);
  EXPECT_EQ(fb.gamma[*t.criterion_index("unemployment_rate")], 2e-6);
}
