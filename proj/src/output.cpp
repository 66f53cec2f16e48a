#include "gsmlayer/output.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gsml {

void write_csv(std::ostream& out, const std::vector<sweep_record>& records) {
    if (records.empty()) throw std::invalid_argument("write_csv: no records");

    out << "frequency_hz";
    for (const auto& [name, value] : records.front().params) out << "," << name;
    out << ",port_i,port_j,re,im,mag_db,phase_deg\n";

    out << std::setprecision(17);
    for (const sweep_record& rec : records) {
        if (rec.params.size() != records.front().params.size())
            throw std::invalid_argument("write_csv: inconsistent parameter columns");
        for (Eigen::Index i = 0; i < rec.gamma_c.rows(); ++i)
            for (Eigen::Index j = 0; j < rec.gamma_c.cols(); ++j) {
                const cplx v = rec.gamma_c(i, j);
                out << rec.frequency_hz;
                for (const auto& [name, value] : rec.params) out << "," << value;
                out << "," << (i + 1) << "," << (j + 1) << "," << v.real() << ","
                    << v.imag() << "," << 20.0 * std::log10(std::abs(v)) << ","
                    << std::arg(v) * 180.0 / pi << "\n";
            }
    }
}

void write_touchstone(std::ostream& out, const std::vector<sweep_record>& records) {
    if (records.empty()) throw std::invalid_argument("write_touchstone: no records");
    const Eigen::Index e = records.front().gamma_c.rows();
    for (std::size_t q = 0; q < records.size(); ++q) {
        if (!records[q].params.empty())
            throw std::invalid_argument(
                "write_touchstone: only pure frequency sweeps are representable");
        if (records[q].gamma_c.rows() != e || records[q].gamma_c.cols() != e)
            throw std::invalid_argument("write_touchstone: port count varies");
        if (q > 0 && !(records[q].frequency_hz > records[q - 1].frequency_hz))
            throw std::invalid_argument(
                "write_touchstone: frequencies must be strictly increasing");
    }

    out << "! composite antenna reflection above a layered medium\n";
    out << "# Hz S RI R 50\n";
    out << std::setprecision(17);
    for (const sweep_record& rec : records) {
        if (e == 2) {
            // 2-port convention: S11 S21 S12 S22 on one line
            out << rec.frequency_hz;
            const int order[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
            for (const auto& [i, j] : order)
                out << " " << rec.gamma_c(i, j).real() << " "
                    << rec.gamma_c(i, j).imag();
            out << "\n";
        } else {
            // row-major, one matrix row per line, frequency leading the first
            for (Eigen::Index i = 0; i < e; ++i) {
                if (i == 0) out << rec.frequency_hz;
                for (Eigen::Index j = 0; j < e; ++j)
                    out << " " << rec.gamma_c(i, j).real() << " "
                        << rec.gamma_c(i, j).imag();
                out << "\n";
            }
        }
    }
}

std::vector<observed_point> read_observed_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("observed data '" + path + "': cannot open");

    std::string header;
    if (!std::getline(in, header))
        throw std::runtime_error("observed data '" + path + "': empty file");

    // locate the needed columns by name, tolerating extra columns
    std::vector<std::string> names;
    {
        std::istringstream hs(header);
        std::string col;
        while (std::getline(hs, col, ',')) names.push_back(col);
    }
    auto col_index = [&](const std::string& want) {
        for (std::size_t c = 0; c < names.size(); ++c)
            if (names[c] == want) return static_cast<int>(c);
        throw std::runtime_error("observed data '" + path + "': column '" + want +
                                 "' missing");
    };
    const int c_freq = col_index("frequency_hz");
    const int c_pi = col_index("port_i");
    const int c_pj = col_index("port_j");
    const int c_re = col_index("re");
    const int c_im = col_index("im");

    std::vector<observed_point> points;
    std::string line;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (static_cast<int>(cells.size()) < static_cast<int>(names.size()))
            throw std::runtime_error("observed data '" + path + "': short row at line " +
                                     std::to_string(line_no));
        observed_point p;
        p.frequency_hz = std::stod(cells[c_freq]);
        p.port_i = std::stoi(cells[c_pi]);
        p.port_j = std::stoi(cells[c_pj]);
        p.value = cplx(std::stod(cells[c_re]), std::stod(cells[c_im]));
        points.push_back(p);
    }
    if (points.empty())
        throw std::runtime_error("observed data '" + path + "': no data rows");
    return points;
}

} // namespace gsml
