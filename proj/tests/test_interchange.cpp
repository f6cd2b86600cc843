#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "oamplex/error.hpp"
#include "oamplex/interchange.hpp"
#include "test_support.hpp"

namespace oamplex {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected oamplex::Error";
  return ErrorCode::IoError;
}

TEST(DensityText, RoundTripIsExact) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    const BasisSpec basis(testing::range_basis(-k % 3, 2 + k % 4));
    const auto rho = testing::random_density(rng, basis);
    const auto back = density_from_text(density_to_text(rho));
    EXPECT_EQ(back.basis().indices(), basis.indices());
    EXPECT_EQ(back.elements(), rho.elements());
  }
}

TEST(DensityText, Malformed) {
  EXPECT_EQ(code_of([] { density_from_text("{\"basis\": [0, 1], "); }), ErrorCode::SyntaxError);
  EXPECT_EQ(code_of([] { density_from_text(R"({"basis": [0, 1], "re": [[1, 0]], "im": [[0, 0]]})"); }),
            ErrorCode::ValidationError);
  // Well-formed but not a density matrix.
  EXPECT_EQ(code_of([] { density_from_text(R"({"basis": [0, 1], "re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]})"); }),
            ErrorCode::InvalidDensityMatrix);
}

TEST(PortText, EmptyPortWritesZeros) {
  const BasisSpec basis({0, 1});
  const auto text = port_state_to_text(basis, PortState{});
  EXPECT_NE(text.find("\"weight\": 0.0"), std::string::npos);
  EXPECT_EQ(code_of([&] { density_from_text(text); }), ErrorCode::InvalidDensityMatrix);
}

TEST(PortText, NonEmptyPortReadsBackAsDensity) {
  const BasisSpec basis({0, 1});
  const PortState port{0.75, maximally_mixed(basis)};
  EXPECT_EQ(density_from_text(port_state_to_text(basis, port)).elements(), port.rho->elements());
}

TEST(CountText, RoundTrip) {
  const BasisSpec basis({-4, -2, 1, 3});
  const DensityMatrix rho(basis, testing::multiplexed_reference());
  const auto records = simulate_counts(ideal_probabilities(rho, projector_set(basis)), 1e5, 2016);
  EXPECT_EQ(count_records_from_text(count_records_to_text(records)), records);
}

TEST(CountText, Malformed) {
  EXPECT_EQ(code_of([] { count_records_from_text("[{\"label\": \"D(0)\""); }), ErrorCode::SyntaxError);
  EXPECT_EQ(code_of([] { count_records_from_text(R"j([{"label": "Q(0)", "P": 0.5, "counts": 1, "N": 10, "seed": 0}])j"); }),
            ErrorCode::ValidationError);
  EXPECT_EQ(code_of([] { count_records_from_text(R"j({"label": "D(0)"})j"); }), ErrorCode::ValidationError);
}

TEST(TextFiles, WriteThenRead) {
  const auto dir = std::filesystem::temp_directory_path() / "oamplex_interchange_test";
  std::filesystem::remove_all(dir);
  const auto path = dir / "nested" / "file.json";
  write_text_file(path, "{}\n");
  EXPECT_EQ(read_text_file(path), "{}\n");
  EXPECT_EQ(code_of([&] { read_text_file(dir / "missing.json"); }), ErrorCode::IoError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace oamplex
