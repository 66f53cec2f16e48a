#include "gsmlayer/wcache.hpp"

#include <bit>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace gsml {

namespace {

constexpr char magic[4] = {'W', 'C', 'B', '1'};

std::string entry_path(const std::string& dir, std::uint64_t key) {
    return dir + "/w_" + hex64(key) + ".wcb";
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = char((v >> (8 * b)) & 0xff);
    out.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= std::uint64_t(bytes[b]) << (8 * b);
    return v;
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

} // namespace

std::uint64_t w_cache_key(int l_max, std::uint64_t stack_hash, double frequency_hz,
                          std::uint64_t contour_hash) {
    fnv1a64 h;
    h.feed_i32(l_max);
    h.feed_u64(stack_hash);
    h.feed_double(frequency_hz);
    h.feed_u64(contour_hash);
    return h.digest();
}

void store_wmatrix(const std::string& cache_dir, std::uint64_t key, const wmatrix& w) {
    std::filesystem::create_directories(cache_dir);
    const std::string path = entry_path(cache_dir, key);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("w cache: cannot write '" + path + "'");

    out.write(magic, 4);
    put_u64(out, key);
    put_u64(out, std::uint64_t(w.basis.l_max));
    put_f64(out, w.frequency_hz);
    put_u64(out, w.stack_hash);
    put_u64(out, w.contour_hash);
    fnv1a64 sum;
    for (const Eigen::MatrixXcd& block : w.blocks) {
        put_u64(out, std::uint64_t(block.rows()));
        for (Eigen::Index r = 0; r < block.rows(); ++r)
            for (Eigen::Index c = 0; c < block.cols(); ++c) {
                put_f64(out, block(r, c).real());
                put_f64(out, block(r, c).imag());
                sum.feed_double(block(r, c).real());
                sum.feed_double(block(r, c).imag());
            }
    }
    put_u64(out, sum.digest());  // trailing checksum guards the payload
    if (!out) throw std::runtime_error("w cache: write failed for '" + path + "'");
}

bool load_wmatrix(const std::string& cache_dir, std::uint64_t key, wmatrix& out) {
    const std::string path = entry_path(cache_dir, key);
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;  // miss

    char got[4];
    in.read(got, 4);
    if (!in || std::memcmp(got, magic, 4) != 0)
        throw std::runtime_error("w cache: bad magic in '" + path + "'");
    if (get_u64(in) != key)
        throw std::runtime_error("w cache: key mismatch in '" + path + "'");

    const int l_max = static_cast<int>(get_u64(in));
    if (l_max < 1 || l_max > 512)
        throw std::runtime_error("w cache: implausible degree in '" + path + "'");
    out.basis = make_svwf_basis(l_max);
    out.frequency_hz = get_f64(in);
    out.stack_hash = get_u64(in);
    out.contour_hash = get_u64(in);

    out.rows_by_m = out.basis.indices_by_m();
    out.pos_in_block.assign(out.basis.size(), -1);
    for (const auto& group : out.rows_by_m)
        for (std::size_t r = 0; r < group.size(); ++r)
            out.pos_in_block[group[r]] = static_cast<int>(r);

    out.blocks.assign(l_max + 1, {});
    fnv1a64 sum;
    for (int m = 0; m <= l_max; ++m) {
        const auto rows = get_u64(in);
        if (rows != out.rows_by_m[m].size())
            throw std::runtime_error("w cache: block shape mismatch in '" + path + "'");
        Eigen::MatrixXcd block(rows, rows);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < rows; ++c) {
                const double re = get_f64(in);
                const double im = get_f64(in);
                block(r, c) = cplx(re, im);
                sum.feed_double(re);
                sum.feed_double(im);
            }
        out.blocks[m] = std::move(block);
    }
    const std::uint64_t stored = get_u64(in);
    if (!in) throw std::runtime_error("w cache: truncated entry '" + path + "'");
    if (stored != sum.digest())
        throw std::runtime_error("w cache: checksum mismatch in '" + path + "'");
    return true;
}

} // namespace gsml
