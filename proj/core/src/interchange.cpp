#include "oamplex/interchange.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oamplex/error.hpp"

namespace oamplex {

using nlohmann::json;

namespace {

json matrix_part(const ComplexMatrix& m, bool imaginary) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(imaginary ? m(i, j).imag() : m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

json real_matrix(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json density_json(const BasisSpec& basis, const ComplexMatrix& m) {
  json out;
  out["basis"] = basis.indices();
  out["re"] = matrix_part(m, false);
  out["im"] = matrix_part(m, true);
  return out;
}

json parse_or_throw(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError, std::string("malformed interchange text at byte ") + std::to_string(e.byte) + ": " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string density_to_text(const DensityMatrix& rho) { return dump(density_json(rho.basis(), rho.elements())); }

DensityMatrix density_from_text(std::string_view text) {
  const json j = parse_or_throw(text);
  try {
    BasisSpec basis(j.at("basis").get<std::vector<int>>());
    const auto re = j.at("re").get<std::vector<std::vector<double>>>();
    const auto im = j.at("im").get<std::vector<std::vector<double>>>();
    const std::size_t d = basis.size();
    if (re.size() != d || im.size() != d) throw Error(ErrorCode::ValidationError, "re/im row count does not match basis");
    ComplexMatrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      if (re[i].size() != d || im[i].size() != d) throw Error(ErrorCode::ValidationError, "re/im column count does not match basis");
      for (std::size_t k = 0; k < d; ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = Complex(re[i][k], im[i][k]);
    }
    return DensityMatrix(std::move(basis), std::move(m));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ValidationError, std::string("density matrix object: ") + e.what());
  }
}

std::string port_state_to_text(const BasisSpec& basis, const PortState& port) {
  const auto d = static_cast<Eigen::Index>(basis.size());
  json out = density_json(basis, port.rho ? port.rho->elements() : ComplexMatrix::Zero(d, d));
  out["weight"] = port.weight;
  return dump(out);
}

std::string count_records_to_text(std::span<const CountRecord> records) {
  json out = json::array();
  for (const auto& r : records) {
    out.push_back({{"label", to_string(r.label)}, {"P", r.probability}, {"counts", r.counts}, {"N", r.exposure}, {"seed", r.seed}});
  }
  return dump(out);
}

std::vector<CountRecord> count_records_from_text(std::string_view text) {
  const json j = parse_or_throw(text);
  std::vector<CountRecord> out;
  try {
    for (const auto& item : j) {
      CountRecord r;
      r.label = parse_projector_label(item.at("label").get<std::string>());
      r.probability = item.at("P").get<double>();
      r.counts = item.at("counts").get<std::uint64_t>();
      r.exposure = item.at("N").get<double>();
      r.seed = item.at("seed").get<std::uint64_t>();
      out.push_back(r);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ValidationError, std::string("count record: ") + e.what());
  }
  return out;
}

std::string tomography_result_to_text(const TomographyResult& result) {
  json out;
  out["rho_linear"] = density_json(result.linear.basis, result.linear.rho);
  out["rho_physical"] = density_json(result.rho_physical.basis(), result.rho_physical.elements());
  out["fidelity"] = result.fidelity;
  out["fidelity_squared"] = result.fidelity_squared;
  out["std_error_re"] = real_matrix(result.linear.std_error_real);
  out["std_error_im"] = real_matrix(result.linear.std_error_imag);
  return dump(out);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace oamplex
