#pragma once

// JSON configuration ingestion for the heatcoeff tool.
//
// Every config carries "schema": "1" and a "kind" discriminator. Complex numbers are
// [re, im] (a bare number is real), matrices are arrays of rows, grids are C order.

#include "heatcoeff/fourier.hpp"
#include "heatcoeff/geometry.hpp"
#include "heatcoeff/heat_coefficients.hpp"
#include "heatcoeff/nct.hpp"
#include "heatcoeff/oracle.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace heatcoeff::cli {

using json = nlohmann::json;

enum class ConfigKind { explicit_grid, fourier_fields, nct2, nct4, chart_analytic };

ConfigKind parse_kind(const std::string& s);
std::string to_string(ConfigKind k);

//! Knobs that command-line flags may override.
struct Overrides {
  std::optional<int> cutoff;
  std::optional<double> cluster_tol;
  std::optional<double> gap_tol;
  std::optional<int> threads;
  std::optional<unsigned long long> seed;
};

//! Parses the file and checks the schema version and kind; throws ValidationError.
json load_config(const std::string& path);
//! Same checks on an in-memory document.
json check_config(json doc);
ConfigKind config_kind(const json& doc);

// ----------------------------------------------------------------------------
// value codecs

cplx parse_complex(const json& j);
json to_json(cplx z);
//! Array of rows of complex entries; a bare number c means c times the N x N identity.
Mat parse_matrix(const json& j, int N);
json to_json(const Mat& m);
RMat parse_real_matrix(const json& j);
json to_json(const RMat& m);

NctElement parse_nct_element(const json& j);
json to_json(const NctElement& a);

/*! {"modes": [{"k": [ints], "c": matrix}, ...]} or a constant matrix.
    The mode list may be empty (zero field). */
FourierField parse_fourier_field(const json& j, int dim, int N);

// ----------------------------------------------------------------------------
// typed configurations

//! Operator given by Fourier coefficients ("fourier-fields") or grid samples ("explicit-grid").
struct FourierConfig {
  FourierOperator op;
  std::vector<std::optional<FourierField>> weights;  // empty weight list means the identity
  DensityForm form = DensityForm::automatic;
  int density_points = 64;
  VerifyOptions verify;
  LocalOptions local;
  SpectralOptions spectral;
};

//! Jets at one chart point.
struct ChartConfig {
  MetricJet metric;
  int N = 1;
  std::string fields = "uvw";  // uvw | upq | conformal
  PointFieldsUVW uvw;
  PointFieldsUPQ upq;
  MatJet k;
  std::vector<MatJet> A;
  LocalOptions local;
  SpectralOptions spectral;
};

struct Nct2Config {
  NctElement k;
  cplx tau{0.0, 1.0};
  std::vector<std::optional<NctElement>> weights;
  NctCurvatureOptions curvature;
  VerifyOptions verify;
};

struct Nct4Config {
  NctElement k;
  RMat g_inv;
  NctCurvatureOptions curvature;
};

FourierConfig parse_fourier_config(const json& doc, const Overrides& ov = {});
ChartConfig parse_chart_config(const json& doc, const Overrides& ov = {});
Nct2Config parse_nct2_config(const json& doc, const Overrides& ov = {});
Nct4Config parse_nct4_config(const json& doc, const Overrides& ov = {});

}  // namespace heatcoeff::cli
