#include "taylorlab/field_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace taylorlab::transform {

namespace {

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

}  // namespace

void write_field_csv(std::ostream& os, const TransformField& field) {
    os << std::setprecision(17);
    os << "# taylorlab-field 1\n";
    os << "# alpha: " << field.alpha << "\n";
    os << "# t: " << field.t << "\n";
    os << "# swept: " << field.swept_index << "\n";
    os << "# fixed:";
    for (Eigen::Index k = 0; k < field.fixed_s.size(); ++k) os << ' ' << field.fixed_s[k];
    os << "\n";
    os << "# normalized: " << (field.normalized ? 1 : 0) << "\n";
    os << "# s_axis:";
    for (double s : field.s_axis) os << ' ' << s;
    os << "\n";
    for (Eigen::Index r = 0; r < field.values.rows(); ++r) {
        os << field.a_axis[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < field.values.cols(); ++c) os << ',' << field.values(r, c);
        os << "\n";
    }
}

void write_field_csv_file(const std::string& path, const TransformField& field) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_field_csv(os, field);
}

TransformField read_field_csv(std::istream& is) {
    TransformField field;
    std::vector<std::vector<double>> rows;
    std::string line;
    bool saw_header = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::stringstream ss(line.substr(1));
            std::string key;
            ss >> key;
            if (key == "taylorlab-field") {
                saw_header = true;
            } else if (key == "alpha:") {
                ss >> field.alpha;
            } else if (key == "t:") {
                ss >> field.t;
            } else if (key == "swept:") {
                ss >> field.swept_index;
            } else if (key == "fixed:") {
                std::vector<double> vals;
                double v;
                while (ss >> v) vals.push_back(v);
                field.fixed_s = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
            } else if (key == "normalized:") {
                int flag = 0;
                ss >> flag;
                field.normalized = flag != 0;
            } else if (key == "s_axis:") {
                double v;
                while (ss >> v) field.s_axis.push_back(v);
            }
            continue;
        }
        rows.push_back(parse_doubles(line));
    }
    if (!saw_header) throw std::runtime_error("field CSV: missing header line");
    if (field.s_axis.empty()) throw std::runtime_error("field CSV: missing s axis");
    field.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(field.s_axis.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != field.s_axis.size() + 1)
            throw std::runtime_error("field CSV: row width does not match s axis");
        field.a_axis.push_back(rows[r][0]);
        for (std::size_t c = 0; c < field.s_axis.size(); ++c)
            field.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c + 1];
    }
    return field;
}

TransformField read_field_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open field CSV: " + path);
    return read_field_csv(is);
}

void write_field_pgm_file(const std::string& path, const TransformField& field,
                          std::optional<double> marker) {
    const Eigen::Index rows = field.values.rows();
    const Eigen::Index cols = field.values.cols();
    if (rows == 0 || cols == 0) throw std::runtime_error("PGM: empty field");

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << "P5\n" << cols << ' ' << rows << "\n255\n";

    Eigen::Index marker_col = -1;
    if (marker) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < field.s_axis.size(); ++c) {
            const double d = std::abs(field.s_axis[c] - *marker);
            if (d < best) {
                best = d;
                marker_col = static_cast<Eigen::Index>(c);
            }
        }
    }

    std::vector<std::uint8_t> scanline(static_cast<std::size_t>(cols));
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double row_max = field.values.row(r).cwiseAbs().maxCoeff();
        for (Eigen::Index c = 0; c < cols; ++c) {
            double v = row_max > 0.0 ? std::abs(field.values(r, c)) / row_max : 0.0;
            int pixel = static_cast<int>(std::lround(v * 255.0));
            pixel = std::clamp(pixel, 0, 255);
            if (c == marker_col) pixel = 255 - pixel;
            scanline[static_cast<std::size_t>(c)] = static_cast<std::uint8_t>(pixel);
        }
        os.write(reinterpret_cast<const char*>(scanline.data()), static_cast<std::streamsize>(scanline.size()));
    }
    if (!os) throw std::runtime_error("PGM: write failed: " + path);
}

}  // namespace taylorlab::transform
