#include "gsmlayer/gsmio.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gsml {

namespace {

using nlohmann::json;

void append_f64le(std::string& buf, double v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) buf.push_back(char((bits >> (8 * b)) & 0xff));
}

double take_f64le(const std::string& buf, std::size_t& off) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
        bits |= std::uint64_t(static_cast<unsigned char>(buf[off + b])) << (8 * b);
    off += 8;
    return std::bit_cast<double>(bits);
}

void append_matrix(std::string& buf, const Eigen::MatrixXcd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            append_f64le(buf, m(r, c).real());
            append_f64le(buf, m(r, c).imag());
        }
}

Eigen::MatrixXcd take_matrix(const std::string& buf, std::size_t& off, int rows,
                             int cols) {
    Eigen::MatrixXcd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double re = take_f64le(buf, off);
            double im = take_f64le(buf, off);
            m(r, c) = cplx(re, im);
        }
    return m;
}

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
    throw std::runtime_error("gsm file '" + path + "': " + what);
}

// per-frequency payload size in bytes for e ports and j modes
std::size_t blocks_bytes(int e, int j) {
    return 16u * (std::size_t(e) * e + 2u * std::size_t(e) * j +
                  std::size_t(j) * j);
}

} // namespace

void gsm_file::validate() const {
    if (l_max < 1) throw std::invalid_argument("gsm_file: l_max must be >= 1");
    if (ports < 1) throw std::invalid_argument("gsm_file: need at least one port");
    if (!(r_min_m > 0.0))
        throw std::invalid_argument("gsm_file: r_min_m must be positive");
    if (frequencies_hz.empty())
        throw std::invalid_argument("gsm_file: frequency list is empty");
    for (std::size_t q = 1; q < frequencies_hz.size(); ++q)
        if (!(frequencies_hz[q] > frequencies_hz[q - 1]))
            throw std::invalid_argument("gsm_file: frequencies must be strictly increasing");
    if (blocks.size() != frequencies_hz.size())
        throw std::invalid_argument("gsm_file: one block set per frequency required");
    if (!port_labels.empty() && static_cast<int>(port_labels.size()) != ports)
        throw std::invalid_argument("gsm_file: port label count mismatch");
    for (std::size_t q = 0; q < blocks.size(); ++q) {
        const gsm_blocks& b = blocks[q];
        b.validate();
        if (b.basis.l_max != l_max || b.ports() != ports)
            throw std::invalid_argument("gsm_file: block dimensions disagree with header");
        if (b.frequency_hz != frequencies_hz[q])
            throw std::invalid_argument("gsm_file: block frequency disagrees with header");
    }
}

void write_gsm(const gsm_file& file, const std::string& path) {
    file.validate();

    std::string payload;
    const int j = svwf_basis_size(file.l_max);
    payload.reserve(file.blocks.size() * blocks_bytes(file.ports, j));
    for (const gsm_blocks& b : file.blocks) {
        append_matrix(payload, b.gamma);
        append_matrix(payload, b.r_block);
        append_matrix(payload, b.t_block);
        append_matrix(payload, b.s_block);
    }

    fnv1a64 h;
    h.feed(payload.data(), payload.size());

    json header;
    header["antenna"] = file.antenna;
    header["r_min_m"] = file.r_min_m;
    header["l_max"] = file.l_max;
    header["ports"] = file.ports;
    header["port_labels"] = file.port_labels;
    header["frequencies_hz"] = file.frequencies_hz;
    header["payload_bytes"] = payload.size();
    header["checksum_fnv1a64"] = hex64(h.digest());

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("gsm file '" + path + "': cannot open for writing");
    out << "GSMB 1\n" << header.dump() << "\n" << payload;
    if (!out) throw std::runtime_error("gsm file '" + path + "': write failed");
}

gsm_file read_gsm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) schema_error(path, "cannot open");

    std::string magic;
    if (!std::getline(in, magic) || magic != "GSMB 1")
        schema_error(path, "bad magic line (expected 'GSMB 1')");
    std::string header_line;
    if (!std::getline(in, header_line)) schema_error(path, "missing header line");

    json header;
    try {
        header = json::parse(header_line);
    } catch (const json::exception& e) {
        schema_error(path, std::string("header is not valid JSON: ") + e.what());
    }

    auto need = [&](const char* key) -> const json& {
        if (!header.contains(key))
            schema_error(path, std::string("header.") + key + " missing");
        return header.at(key);
    };
    gsm_file file;
    try {
        file.antenna = need("antenna").get<std::string>();
        file.r_min_m = need("r_min_m").get<double>();
        file.l_max = need("l_max").get<int>();
        file.ports = need("ports").get<int>();
        file.port_labels = need("port_labels").get<std::vector<std::string>>();
        file.frequencies_hz = need("frequencies_hz").get<std::vector<double>>();
    } catch (const json::exception& e) {
        schema_error(path, std::string("header field has wrong type: ") + e.what());
    }
    const std::size_t payload_bytes = need("payload_bytes").get<std::size_t>();
    const std::string checksum = need("checksum_fnv1a64").get<std::string>();

    if (file.l_max < 1) schema_error(path, "header.l_max must be >= 1");
    if (file.ports < 1) schema_error(path, "header.ports must be >= 1");
    if (file.frequencies_hz.empty())
        schema_error(path, "header.frequencies_hz must be non-empty");

    const int j = svwf_basis_size(file.l_max);
    const std::size_t expected =
        file.frequencies_hz.size() * blocks_bytes(file.ports, j);
    if (payload_bytes != expected) {
        std::ostringstream os;
        os << "header.payload_bytes=" << payload_bytes << " inconsistent with "
           << file.frequencies_hz.size() << " frequencies, " << file.ports
           << " ports, " << j << " modes (expected " << expected << ")";
        schema_error(path, os.str());
    }

    std::string payload(payload_bytes, '\0');
    in.read(payload.data(), static_cast<std::streamsize>(payload_bytes));
    if (static_cast<std::size_t>(in.gcount()) != payload_bytes) {
        std::ostringstream os;
        os << "payload truncated (expected " << payload_bytes << " bytes, got "
           << in.gcount() << ")";
        schema_error(path, os.str());
    }

    fnv1a64 h;
    h.feed(payload.data(), payload.size());
    if (hex64(h.digest()) != checksum)
        schema_error(path, "payload checksum mismatch");

    const svwf_basis basis = make_svwf_basis(file.l_max);
    std::size_t off = 0;
    for (double f : file.frequencies_hz) {
        gsm_blocks b;
        b.gamma = take_matrix(payload, off, file.ports, file.ports);
        b.r_block = take_matrix(payload, off, file.ports, j);
        b.t_block = take_matrix(payload, off, j, file.ports);
        b.s_block = take_matrix(payload, off, j, j);
        b.frequency_hz = f;
        b.basis = basis;
        b.port_labels = file.port_labels;
        file.blocks.push_back(std::move(b));
    }
    file.validate();
    return file;
}

namespace {

// deterministic standard normals: Box-Muller over the raw 53-bit uniforms of
// a seeded mt19937_64 (library distributions are not sequence-stable)
class normal_stream {
public:
    explicit normal_stream(std::uint64_t seed) : eng_(seed) {}
    double next() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * pi * u2);
        have_ = true;
        return r * std::cos(2.0 * pi * u2);
    }
    cplx next_cplx() {
        const double re = next();
        return {re, next()};
    }

private:
    double uniform() { return double(eng_() >> 11) * 0x1p-53; }
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_ = false;
};

double spectral_radius(const Eigen::MatrixXcd& m) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

gsm_blocks make_single_mode(const synthetic_gsm_spec& spec, const svwf_basis& basis,
                            double frequency_hz, bool diagonal) {
    const int j = basis.size();
    gsm_blocks b;
    b.basis = basis;
    b.frequency_hz = frequency_hz;
    b.gamma = Eigen::MatrixXcd::Constant(1, 1, spec.gamma0);
    b.t_block = Eigen::MatrixXcd::Zero(j, 1);
    b.t_block(basis.position(spec.excited), 0) = 1.0;
    b.r_block = b.t_block.transpose();  // generator convenience, not physics
    b.s_block = Eigen::MatrixXcd::Identity(j, j);
    if (diagonal) {
        for (int idx = 0; idx < j; ++idx) {
            const svwf_index& n = basis.modes[idx];
            auto it = spec.s_diagonal.find({n.tau, n.l});
            if (it != spec.s_diagonal.end()) b.s_block(idx, idx) = it->second;
        }
    }
    b.port_labels = {spec.excited.to_string()};
    return b;
}

gsm_blocks make_random_passive(const synthetic_gsm_spec& spec,
                               const svwf_basis& basis, double frequency_hz,
                               const wmatrix* w_ref) {
    const int j = basis.size();
    const int e = std::max(1, spec.ports);
    // radiating antennas couple weakly to degrees beyond the electrical size
    // of their circumscribing sphere; anchoring the roll-off to k r_min (not
    // to the basis size) keeps the same spec physically consistent across
    // truncations, and without it a flat random GSM behaves like an
    // unphysical superscatterer
    const double k_r = 2.0 * pi * frequency_hz / speed_of_light * spec.r_min_m;
    const int l_cut = static_cast<int>(std::ceil(k_r)) + 1;
    Eigen::VectorXd decay(j);
    for (int idx = 0; idx < j; ++idx)
        decay(idx) = std::exp(-1.2 * std::max(0, basis.modes[idx].l - l_cut));

    for (int attempt = 0; attempt < 10; ++attempt) {
        normal_stream rng(spec.seed + 0x9e3779b97f4a7c15ull * attempt);

        gsm_blocks b;
        b.basis = basis;
        b.frequency_hz = frequency_hz;
        b.gamma.resize(e, e);
        for (int r = 0; r < e; ++r)
            for (int c = 0; c < e; ++c) b.gamma(r, c) = 0.1 * rng.next_cplx();
        b.t_block.resize(j, e);
        for (int r = 0; r < j; ++r)
            for (int c = 0; c < e; ++c)
                b.t_block(r, c) = 0.15 * decay(r) * rng.next_cplx();
        b.r_block.resize(e, j);
        for (int r = 0; r < e; ++r)
            for (int c = 0; c < j; ++c)
                b.r_block(r, c) = 0.15 * decay(c) * rng.next_cplx();
        Eigen::MatrixXcd pert(j, j);
        for (int r = 0; r < j; ++r)
            for (int c = 0; c < j; ++c)
                pert(r, c) = decay(r) * decay(c) * rng.next_cplx() / std::sqrt(double(j));

        // normalize the feedback strength: exactly against W when available,
        // otherwise on the scatterer alone
        double rho0;
        if (w_ref)
            rho0 = spectral_radius(w_ref->times_dense_right(0.5 * pert));
        else
            rho0 = 0.5 * pert.jacobiSvd().singularValues()(0);
        if (!std::isfinite(rho0) || rho0 <= 0.0) continue;  // degenerate draw
        b.s_block = Eigen::MatrixXcd::Identity(j, j) + (spec.radius_bound / rho0) * pert;

        b.port_labels.resize(e);
        for (int p = 0; p < e; ++p) b.port_labels[p] = "port" + std::to_string(p + 1);
        return b;
    }
    throw std::runtime_error(
        "synthesize_gsm: could not generate a usable random GSM in 10 attempts");
}

} // namespace

gsm_blocks truncate_gsm(const gsm_blocks& b, int l_max_new) {
    b.validate();
    if (l_max_new < 1 || l_max_new > b.basis.l_max)
        throw std::invalid_argument("truncate_gsm: target degree out of range");
    if (l_max_new == b.basis.l_max) return b;
    const int jn = svwf_basis_size(l_max_new);
    gsm_blocks out;
    out.basis = make_svwf_basis(l_max_new);
    out.frequency_hz = b.frequency_hz;
    out.port_labels = b.port_labels;
    out.gamma = b.gamma;
    out.r_block = b.r_block.leftCols(jn);
    out.t_block = b.t_block.topRows(jn);
    out.s_block = b.s_block.topLeftCorner(jn, jn);
    return out;
}

gsm_blocks synthesize_gsm(const synthetic_gsm_spec& spec, const svwf_basis& basis,
                          double frequency_hz, const wmatrix* w_ref) {
    if (basis.l_max < 1)
        throw std::invalid_argument("synthesize_gsm: invalid basis");
    switch (spec.kind) {
        case synthetic_kind::single_mode_radiator:
            return make_single_mode(spec, basis, frequency_hz, false);
        case synthetic_kind::diagonal_scatterer:
            return make_single_mode(spec, basis, frequency_hz, true);
        case synthetic_kind::random_passive:
            return make_random_passive(spec, basis, frequency_hz, w_ref);
    }
    throw std::invalid_argument("synthesize_gsm: unknown kind");
}

} // namespace gsml
