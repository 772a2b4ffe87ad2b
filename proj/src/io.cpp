#include "tanbound/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace tanbound {

namespace {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---- Matrix Market reading ----------------------------------------------

struct MmHeader {
    bool coordinate;
    bool complex_field;
    enum class Symmetry { general, symmetric, hermitian } symmetry;
};

MmHeader parse_mm_banner(const std::string& line, const std::string& path) {
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (banner.fail() || tag != "%%MatrixMarket")
        fail(errc::parse_error, path + ": malformed banner line");
    if (object != "matrix") fail(errc::parse_error, path + ": unsupported object " + object);

    MmHeader header;
    if (format == "array")
        header.coordinate = false;
    else if (format == "coordinate")
        header.coordinate = true;
    else
        fail(errc::parse_error, path + ": unsupported format " + format);

    if (field == "real")
        header.complex_field = false;
    else if (field == "complex")
        header.complex_field = true;
    else
        fail(errc::parse_error, path + ": unsupported field " + field);

    if (symmetry == "general")
        header.symmetry = MmHeader::Symmetry::general;
    else if (symmetry == "symmetric")
        header.symmetry = MmHeader::Symmetry::symmetric;
    else if (symmetry == "hermitian")
        header.symmetry = MmHeader::Symmetry::hermitian;
    else
        fail(errc::parse_error, path + ": unsupported symmetry " + symmetry);

    if (header.symmetry == MmHeader::Symmetry::hermitian && !header.complex_field)
        fail(errc::parse_error, path + ": hermitian storage requires the complex field");
    return header;
}

class TokenReader {
  public:
    explicit TokenReader(std::istream& in, std::string path)
        : in_(in), path_(std::move(path)) {}

    double real() {
        double v = 0.0;
        if (!(in_ >> v)) fail(errc::parse_error, path_ + ": expected a numeric value");
        return v;
    }

    long index() {
        long v = 0;
        if (!(in_ >> v)) fail(errc::parse_error, path_ + ": expected an index");
        return v;
    }

    Complex entry(bool complex_field) {
        const double re = real();
        return Complex(re, complex_field ? real() : 0.0);
    }

    void expect_end() {
        std::string extra;
        if (in_ >> extra) fail(errc::parse_error, path_ + ": trailing data " + extra);
    }

  private:
    std::istream& in_;
    std::string path_;
};

Complex mirrored(Complex v, MmHeader::Symmetry symmetry) {
    return symmetry == MmHeader::Symmetry::hermitian ? std::conj(v) : v;
}

}  // namespace

Eigen::MatrixXcd read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) fail(errc::parse_error, path + ": empty file");
    const MmHeader header = parse_mm_banner(line, path);

    // Comment and blank lines may follow the banner; the first other line
    // carries the sizes.
    std::string size_line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        size_line = line;
        break;
    }
    if (size_line.empty()) fail(errc::parse_error, path + ": missing size line");

    std::istringstream sizes(size_line);
    long rows = 0, cols = 0, entries = 0;
    if (!(sizes >> rows >> cols)) fail(errc::parse_error, path + ": malformed size line");
    if (header.coordinate && !(sizes >> entries))
        fail(errc::parse_error, path + ": coordinate size line needs an entry count");
    if (rows < 1 || cols < 1) fail(errc::parse_error, path + ": dimensions must be positive");
    if (rows > 4096 || cols > 4096)
        fail(errc::size_overflow, path + ": dimension exceeds the 4096 limit");
    if (header.symmetry != MmHeader::Symmetry::general && rows != cols)
        fail(errc::parse_error, path + ": symmetric storage requires a square matrix");

    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows, cols);
    TokenReader tokens(in, path);

    if (!header.coordinate) {
        if (header.symmetry == MmHeader::Symmetry::general) {
            for (long j = 0; j < cols; ++j)
                for (long i = 0; i < rows; ++i) m(i, j) = tokens.entry(header.complex_field);
        } else {
            // Lower triangle per column; the upper triangle is implied.
            for (long j = 0; j < cols; ++j)
                for (long i = j; i < rows; ++i) {
                    const Complex v = tokens.entry(header.complex_field);
                    m(i, j) = v;
                    if (i != j) m(j, i) = mirrored(v, header.symmetry);
                }
        }
    } else {
        for (long e = 0; e < entries; ++e) {
            const long i = tokens.index() - 1;
            const long j = tokens.index() - 1;
            if (i < 0 || i >= rows || j < 0 || j >= cols)
                fail(errc::parse_error, path + ": coordinate entry out of range");
            if (header.symmetry != MmHeader::Symmetry::general && i < j)
                fail(errc::parse_error,
                     path + ": symmetric storage must list only the lower triangle");
            const Complex v = tokens.entry(header.complex_field);
            m(i, j) = v;
            if (header.symmetry != MmHeader::Symmetry::general && i != j)
                m(j, i) = mirrored(v, header.symmetry);
        }
    }
    tokens.expect_end();
    return m;
}

void write_matrix_market(const Eigen::MatrixXcd& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(errc::io_error, "cannot open " + path + " for writing");

    out << "%%MatrixMarket matrix array complex general\n";
    out << m.rows() << " " << m.cols() << "\n";
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            out << format_real(m(i, j).real()) << " " << format_real(m(i, j).imag()) << "\n";
    out.flush();
    if (!out) fail(errc::io_error, "failed writing " + path);
}

// ---- Reports --------------------------------------------------------------

namespace {

std::string content_digest(const HermitianMatrix& a, const OrthonormalFrame& q1) {
    std::uint64_t hash = 1469598103934665603ULL;
    const auto feed = [&hash](const std::string& s) {
        for (unsigned char c : s) {
            hash ^= c;
            hash *= 1099511628211ULL;
        }
        hash ^= ';';
        hash *= 1099511628211ULL;
    };

    const auto feed_matrix = [&](const Eigen::MatrixXcd& m) {
        feed(std::to_string(m.rows()));
        feed(std::to_string(m.cols()));
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                feed(format_real(m(i, j).real()));
                feed(format_real(m(i, j).imag()));
            }
    };
    feed_matrix(a.mat());
    feed_matrix(q1.cols());

    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

OracleBlock apriori_oracle(const HermitianMatrix& a, const OrthonormalFrame& q1,
                           const AprioriCertificate& cert) {
    const Spectrum spec_a = hermitian_spectrum(a, true);
    const OrthonormalFrame x1 = exact_subspace(spec_a, *cert.window, SubspaceSelect::exterior);

    OracleBlock oracle;
    oracle.exact_largest_angle = principal_angles(q1, x1).largest();
    oracle.exact_tan = std::tan(oracle.exact_largest_angle);
    oracle.exact_eigenvalues.assign(spec_a.values.data(),
                                    spec_a.values.data() + spec_a.values.size());
    oracle.enclosure_ok = enclosure_check(spec_a, cert);
    return oracle;
}

OracleBlock aposteriori_oracle(const HermitianMatrix& a, const OrthonormalFrame& q1,
                               const AposterioriCertificate& cert) {
    const Spectrum spec_a = hermitian_spectrum(a, true);
    const double tol = 1e-9 * (1.0 + a.max_abs());
    const GapWindow& w = *cert.window;

    std::vector<Eigen::Index> picked;
    for (Eigen::Index i = 0; i < spec_a.values.size(); ++i) {
        const double lambda = spec_a.values(i);
        if (lambda < w.lo - tol || lambda > w.hi + tol) picked.push_back(i);
    }
    Eigen::MatrixXcd cols(a.n(), static_cast<Eigen::Index>(picked.size()));
    for (std::size_t j = 0; j < picked.size(); ++j)
        cols.col(static_cast<Eigen::Index>(j)) = spec_a.vectors->col(picked[j]);
    const OrthonormalFrame x1 = OrthonormalFrame::validated(cols);

    OracleBlock oracle;
    oracle.exact_largest_angle = principal_angles(q1, x1).largest();
    oracle.exact_tan = std::tan(oracle.exact_largest_angle);
    oracle.exact_eigenvalues.assign(spec_a.values.data(),
                                    spec_a.values.data() + spec_a.values.size());
    return oracle;
}

nlohmann::json window_json(const std::optional<GapWindow>& window) {
    if (!window) return nullptr;
    nlohmann::json j;
    j["lo"] = window->lo;
    j["hi"] = window->hi;
    j["gap"] = window->gap;
    return j;
}

nlohmann::json certificate_json(const AprioriCertificate& cert) {
    nlohmann::json j;
    j["valid"] = cert.valid;
    j["window"] = window_json(cert.window);
    j["rho"] = cert.rho;
    j["admissible"] = cert.admissible;
    j["tan_bound"] = cert.tan_bound;
    j["angle_bound"] = cert.angle_bound;
    j["delta_r"] = cert.delta_r;
    j["enclosure_lo"] = cert.enclosure_lo;
    j["enclosure_hi"] = cert.enclosure_hi;
    j["k"] = static_cast<std::int64_t>(cert.k);
    if (cert.failure_reason) j["failure_reason"] = failure_reason_name(*cert.failure_reason);
    return j;
}

nlohmann::json certificate_json(const AposterioriCertificate& cert) {
    nlohmann::json j;
    j["valid"] = cert.valid;
    j["window"] = window_json(cert.window);
    j["rho"] = cert.rho;
    j["tan_bound"] = cert.tan_bound;
    j["angle_bound"] = cert.angle_bound;
    j["k"] = static_cast<std::int64_t>(cert.k);
    if (cert.failure_reason) j["failure_reason"] = failure_reason_name(*cert.failure_reason);
    return j;
}

void dump_canonical(const nlohmann::json& value, std::string& out) {
    using value_t = nlohmann::json::value_t;
    switch (value.type()) {
        case value_t::null:
            out += "null";
            break;
        case value_t::boolean:
            out += value.get<bool>() ? "true" : "false";
            break;
        case value_t::number_integer:
            out += std::to_string(value.get<std::int64_t>());
            break;
        case value_t::number_unsigned:
            out += std::to_string(value.get<std::uint64_t>());
            break;
        case value_t::number_float: {
            const double d = value.get<double>();
            out += std::isfinite(d) ? format_real(d) : "null";
            break;
        }
        case value_t::string:
            out += nlohmann::json(value.get<std::string>()).dump();
            break;
        case value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& item : value) {
                if (!first) out += ',';
                first = false;
                dump_canonical(item, out);
            }
            out += ']';
            break;
        }
        case value_t::object: {
            out += '{';
            bool first = true;
            for (const auto& [key, item] : value.items()) {
                if (!first) out += ',';
                first = false;
                out += nlohmann::json(key).dump();
                out += ':';
                dump_canonical(item, out);
            }
            out += '}';
            break;
        }
        default:
            out += "null";
            break;
    }
}

}  // namespace

CertificateReport build_report(const HermitianMatrix& a, const OrthonormalFrame& q1,
                               const AprioriCertificate& cert, bool with_oracle) {
    CertificateReport report;
    report.schema_version = "1";
    report.kind = "apriori";
    report.n = a.n();
    report.k = q1.k();
    report.input_digest = content_digest(a, q1);
    report.certificate = cert;
    if (with_oracle && cert.valid) report.oracle = apriori_oracle(a, q1, cert);
    return report;
}

CertificateReport build_report(const HermitianMatrix& a, const OrthonormalFrame& q1,
                               const AposterioriCertificate& cert, bool with_oracle) {
    CertificateReport report;
    report.schema_version = "1";
    report.kind = "aposteriori";
    report.n = a.n();
    report.k = q1.k();
    report.input_digest = content_digest(a, q1);
    report.certificate = cert;
    if (with_oracle && cert.valid) report.oracle = aposteriori_oracle(a, q1, cert);
    return report;
}

nlohmann::json report_json(const CertificateReport& report) {
    nlohmann::json j;
    j["schema_version"] = report.schema_version;
    j["kind"] = report.kind;
    j["n"] = static_cast<std::int64_t>(report.n);
    j["k"] = static_cast<std::int64_t>(report.k);
    j["input_digest"] = report.input_digest;
    j["certificate"] = std::visit([](const auto& cert) { return certificate_json(cert); },
                                  report.certificate);
    if (report.oracle) {
        nlohmann::json o;
        o["exact_largest_angle"] = report.oracle->exact_largest_angle;
        o["exact_tan"] = report.oracle->exact_tan;
        o["exact_eigenvalues"] = report.oracle->exact_eigenvalues;
        if (report.oracle->enclosure_ok) o["enclosure_ok"] = *report.oracle->enclosure_ok;
        j["oracle"] = o;
    }
    return j;
}

std::string canonical_json(const nlohmann::json& value) {
    std::string out;
    dump_canonical(value, out);
    return out;
}

void write_report(const CertificateReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(errc::io_error, "cannot open " + path + " for writing");
    out << canonical_json(report_json(report)) << "\n";
    out.flush();
    if (!out) fail(errc::io_error, "failed writing " + path);
}

// ---- Sweep CSV and config --------------------------------------------------

std::string sweep_csv_header() { return "instance,seed,n,k,rho,gap,tan_bound,exact_tan,ratio,status\n"; }

std::string sweep_csv_row(const SweepRow& row) {
    std::string line;
    line += std::to_string(row.instance);
    line += ',';
    line += std::to_string(row.seed);
    line += ',';
    line += std::to_string(row.n);
    line += ',';
    line += std::to_string(row.k);
    line += ',';
    line += format_real(row.rho);
    line += ',';
    line += format_real(row.gap);
    line += ',';
    line += format_real(row.tan_bound);
    line += ',';
    line += format_real(row.exact_tan);
    line += ',';
    line += format_real(row.ratio);
    line += ',';
    line += row.status;
    line += '\n';
    return line;
}

EnsembleConfig parse_sweep_config(const nlohmann::json& config) {
    if (!config.is_object()) fail(errc::parse_error, "sweep config must be a JSON object");

    EnsembleConfig out;
    try {
        for (const auto& [key, value] : config.items()) {
            if (key == "count")
                out.count = value.get<std::size_t>();
            else if (key == "seed")
                out.master_seed = value.get<std::uint64_t>();
            else if (key == "n_min")
                out.n_min = value.get<Eigen::Index>();
            else if (key == "n_max")
                out.n_max = value.get<Eigen::Index>();
            else if (key == "eps_min")
                out.eps_min = value.get<double>();
            else if (key == "eps_max")
                out.eps_max = value.get<double>();
            else if (key == "include_counterexample")
                out.include_counterexample = value.get<bool>();
            else
                fail(errc::parse_error, "unknown sweep config key " + key);
        }
    } catch (const nlohmann::json::exception& e) {
        fail(errc::parse_error, std::string("sweep config: ") + e.what());
    }
    return out;
}

// ---- CLI -------------------------------------------------------------------

namespace {

int run_certificate_command(bool apriori_kind, const std::string& matrix_path,
                            const std::string& frame_path, double interior_lo,
                            double interior_hi, bool with_oracle, const std::string& out_path,
                            std::ostream& out) {
    const HermitianMatrix a = validate_hermitian(read_matrix_market(matrix_path));
    const OrthonormalFrame q1 = OrthonormalFrame::validated(read_matrix_market(frame_path));

    bool valid = false;
    CertificateReport report;
    if (apriori_kind) {
        const AprioriCertificate cert = certify_apriori(a, q1);
        valid = cert.valid;
        report = build_report(a, q1, cert, with_oracle);
    } else {
        const AposterioriCertificate cert =
            certify_aposteriori(a, q1, interior_lo, interior_hi);
        valid = cert.valid;
        report = build_report(a, q1, cert, with_oracle);
    }

    if (out_path.empty())
        out << canonical_json(report_json(report)) << "\n";
    else
        write_report(report, out_path);
    return valid ? 0 : 2;
}

int run_angles_command(const std::string& a_path, const std::string& b_path,
                       std::ostream& out) {
    const OrthonormalFrame u = OrthonormalFrame::validated(read_matrix_market(a_path));
    const OrthonormalFrame v = OrthonormalFrame::validated(read_matrix_market(b_path));
    const AngleSet set = principal_angles(u, v);

    nlohmann::json j;
    j["angles"] = set.angles;
    j["largest"] = set.largest();
    out << canonical_json(j) << "\n";
    return 0;
}

int run_sweep_command(const std::string& config_path, const std::string& out_path,
                      std::ostream& out) {
    std::ifstream config_in(config_path);
    if (!config_in) fail(errc::io_error, "cannot open " + config_path);
    nlohmann::json config;
    try {
        config = nlohmann::json::parse(config_in);
    } catch (const nlohmann::json::exception& e) {
        fail(errc::parse_error, config_path + ": " + e.what());
    }
    const EnsembleConfig cfg = parse_sweep_config(config);
    const std::vector<InstanceSpec> specs = random_spec_list(cfg);

    std::ofstream csv(out_path);
    if (!csv) fail(errc::io_error, "cannot open " + out_path + " for writing");
    csv << sweep_csv_header();
    const SweepResult result =
        run_sweep(specs, [&csv](const SweepRow& row) { csv << sweep_csv_row(row); });
    csv.flush();
    if (!csv) fail(errc::io_error, "failed writing " + out_path);

    nlohmann::json summary;
    summary["instances"] = result.instances;
    summary["violations"] = result.violations;
    summary["max_tightness"] = result.max_tightness;
    nlohmann::json reasons = nlohmann::json::object();
    for (const auto& [reason, count] : result.failures_by_reason)
        reasons[failure_reason_name(reason)] = count;
    summary["failures_by_reason"] = reasons;
    out << canonical_json(summary) << "\n";
    return result.violations == 0 ? 0 : 3;
}

int run_counterexample_command(const std::string& out_dir, std::ostream& out) {
    const std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(errc::io_error, "cannot create " + dir.string());

    const auto [a, q1] = canonical_counterexample();
    write_matrix_market(a.mat(), (dir / "A.mtx").string());
    write_matrix_market(q1.cols(), (dir / "Q1.mtx").string());

    const AprioriCertificate cert = certify_apriori(a, q1);
    write_report(build_report(a, q1, cert, false), (dir / "report.json").string());

    out << "wrote A.mtx, Q1.mtx, report.json under " << dir.string() << "\n";
    return 0;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"tan-theta certificates for Hermitian spectral subspaces"};
    app.require_subcommand(1);

    std::string matrix_path, frame_path, out_path;
    bool with_oracle = false;
    double interior_lo = 0.0, interior_hi = 0.0;

    CLI::App* apriori = app.add_subcommand(
        "apriori", "certify from the compressions' spectra alone");
    apriori->add_option("--matrix", matrix_path, "Hermitian matrix (.mtx)")->required();
    apriori->add_option("--frame", frame_path, "orthonormal frame (.mtx)")->required();
    apriori->add_flag("--oracle", with_oracle, "attach exact-eigendecomposition facts");
    apriori->add_option("--out", out_path, "write the JSON report here instead of stdout");

    CLI::App* aposteriori = app.add_subcommand(
        "aposteriori", "certify against a known interior eigenvalue interval");
    aposteriori->add_option("--matrix", matrix_path, "Hermitian matrix (.mtx)")->required();
    aposteriori->add_option("--frame", frame_path, "orthonormal frame (.mtx)")->required();
    aposteriori->add_option("--interior-lo", interior_lo, "lower end of the interior interval")
        ->required();
    aposteriori->add_option("--interior-hi", interior_hi, "upper end of the interior interval")
        ->required();
    aposteriori->add_flag("--oracle", with_oracle, "attach exact-eigendecomposition facts");
    aposteriori->add_option("--out", out_path, "write the JSON report here instead of stdout");

    std::string frame_a_path, frame_b_path;
    CLI::App* angles = app.add_subcommand("angles", "principal angles between two frames");
    angles->add_option("--frame-a", frame_a_path, "first frame (.mtx)")->required();
    angles->add_option("--frame-b", frame_b_path, "second frame (.mtx)")->required();

    std::string config_path, csv_path;
    CLI::App* sweep = app.add_subcommand("sweep", "random-instance certification sweep");
    sweep->add_option("--config", config_path, "JSON sweep configuration")->required();
    sweep->add_option("--out", csv_path, "CSV output path")->required();

    std::string dir_path;
    CLI::App* counterexample = app.add_subcommand(
        "counterexample", "emit the boundary 3x3 instance and its report");
    counterexample->add_option("--out", dir_path, "output directory (default .)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (apriori->parsed())
            return run_certificate_command(true, matrix_path, frame_path, 0.0, 0.0,
                                           with_oracle, out_path, out);
        if (aposteriori->parsed())
            return run_certificate_command(false, matrix_path, frame_path, interior_lo,
                                           interior_hi, with_oracle, out_path, out);
        if (angles->parsed()) return run_angles_command(frame_a_path, frame_b_path, out);
        if (sweep->parsed()) return run_sweep_command(config_path, csv_path, out);
        if (counterexample->parsed()) return run_counterexample_command(dir_path, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "error: no subcommand selected\n";
    return 1;
}

}  // namespace tanbound
