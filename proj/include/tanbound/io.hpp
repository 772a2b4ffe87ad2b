#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include <json.hpp>

#include "tanbound/certify.hpp"
#include "tanbound/ensemble.hpp"

namespace tanbound {

/// Reads a Matrix Market file (array or coordinate; real or complex;
/// general, symmetric, or hermitian) into a dense complex matrix.
/// Symmetric/hermitian storage is lower-triangular and gets mirrored.
/// Dimensions above 4096 are rejected with SIZE_OVERFLOW.
Eigen::MatrixXcd read_matrix_market(const std::string& path);

/// Writes a dense matrix as `array complex general`, column-major, with
/// 17-significant-digit entries; read_matrix_market reproduces it bit-exactly.
void write_matrix_market(const Eigen::MatrixXcd& m, const std::string& path);

/// Oracle facts attached to a report on request: the exact eigenvalues, the
/// exact largest angle to the certified subspace, and (a priori only)
/// whether the enclosure claim checks out.
struct OracleBlock {
    double exact_largest_angle;
    double exact_tan;
    std::vector<double> exact_eigenvalues;
    std::optional<bool> enclosure_ok;
};

/// Self-describing emission of one certificate: problem sizes, a content
/// digest of the inputs, every certificate field, and the optional oracle
/// section.
struct CertificateReport {
    std::string schema_version;
    std::string kind;  // "apriori" or "aposteriori"
    Eigen::Index n;
    Eigen::Index k;
    std::string input_digest;
    std::variant<AprioriCertificate, AposterioriCertificate> certificate;
    std::optional<OracleBlock> oracle;
};

/// Builds the report; with_oracle attaches the oracle section when the
/// certificate is valid (an invalid certificate defines no exact subspace
/// to compare against).
CertificateReport build_report(const HermitianMatrix& a, const OrthonormalFrame& q1,
                               const AprioriCertificate& cert, bool with_oracle);
CertificateReport build_report(const HermitianMatrix& a, const OrthonormalFrame& q1,
                               const AposterioriCertificate& cert, bool with_oracle);

nlohmann::json report_json(const CertificateReport& report);

/// Canonical rendering: keys sorted, reals with 17 significant digits (NaN
/// as null), no trailing newline. Parsing the result reproduces every
/// finite double bit-exactly.
std::string canonical_json(const nlohmann::json& value);

/// canonical_json plus a terminating newline, written atomically enough for
/// tests: fails with IO_ERROR when the path cannot be opened or written.
void write_report(const CertificateReport& report, const std::string& path);

/// CSV layer for sweeps. The header is a stable contract:
/// instance,seed,n,k,rho,gap,tan_bound,exact_tan,ratio,status
std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& row);

/// Parses the sweep subcommand's JSON config into ensemble knobs. Accepted
/// keys (all optional): count, seed, n_min, n_max, eps_min, eps_max,
/// include_counterexample. Unknown keys fail with PARSE_ERROR.
EnsembleConfig parse_sweep_config(const nlohmann::json& config);

/// Full command-line surface. args excludes the program name. Exit codes:
/// 0 success (valid certificate / clean sweep), 1 usage or input error,
/// 2 certificate hypotheses not satisfied, 3 sweep found violations.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tanbound
