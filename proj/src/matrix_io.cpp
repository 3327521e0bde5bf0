#include "hrmc/matrix_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hrmc {

namespace {

Error parse_error(const std::string& path, std::size_t line, const std::string& what) {
    return Error(path + ":" + std::to_string(line) + ": " + what);
}

/// Reads the next non-comment, non-blank line; returns false at EOF.
bool next_line(std::istream& in, std::string& line, std::size_t& lineno,
               bool skip_header_comments = true) {
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t at = line.find_first_not_of(" \t\r");
        if (at == std::string::npos) continue;
        if (skip_header_comments && line[at] == '%' &&
            !(at + 1 < line.size() && line[at + 1] == '%'))
            continue;
        return true;
    }
    return false;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void atomic_write_text(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw Error("failed writing " + tmp.string());
    }
    fs::rename(tmp, target);
}

void write_observed(const std::string& path, const ObservedMatrix& m) {
    std::ostringstream os;
    os << "%%sparse-matrix " << m.n_rows() << ' ' << m.n_cols() << ' ' << m.nnz()
       << '\n';
    m.for_each_entry([&](Index i, Index j, double v) {
        os << (i + 1) << ' ' << (j + 1) << ' ' << format_double(v) << '\n';
    });
    atomic_write_text(path, os.str());
}

ObservedMatrix read_observed(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    if (!next_line(in, line, lineno)) throw Error(path + ": empty file");
    std::istringstream header(line);
    std::string magic;
    Index rows, cols, nnz;
    if (!(header >> magic >> rows >> cols >> nnz) || magic != "%%sparse-matrix")
        throw parse_error(path, lineno,
                          "expected header '%%sparse-matrix <rows> <cols> <nnz>'");
    ObservedMatrix m(rows, cols);
    Index seen = 0;
    while (next_line(in, line, lineno)) {
        std::istringstream fields(line);
        Index r, c;
        double v;
        if (!(fields >> r >> c >> v))
            throw parse_error(path, lineno, "expected '<row> <col> <value>'");
        std::string rest;
        if (fields >> rest)
            throw parse_error(path, lineno, "trailing field '" + rest + "'");
        if (r < 1 || r > rows || c < 1 || c > cols)
            throw parse_error(path, lineno, "index out of range (indices are 1-based)");
        try {
            m.insert(r - 1, c - 1, v);
        } catch (const Error& e) {
            throw parse_error(path, lineno, e.what());
        }
        ++seen;
    }
    if (seen != nnz)
        throw Error(path + ": header declares " + std::to_string(nnz) +
                    " entries but " + std::to_string(seen) + " were found");
    return m;
}

void write_dense(const std::string& path, const Matrix& m) {
    std::ostringstream os;
    os << "%%dense-matrix " << m.rows() << ' ' << m.cols() << '\n';
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) os << ' ';
            os << format_double(m(i, j));
        }
        os << '\n';
    }
    atomic_write_text(path, os.str());
}

Matrix read_dense(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    if (!next_line(in, line, lineno)) throw Error(path + ": empty file");
    std::istringstream header(line);
    std::string magic;
    Index rows, cols;
    if (!(header >> magic >> rows >> cols) || magic != "%%dense-matrix")
        throw parse_error(path, lineno,
                          "expected header '%%dense-matrix <rows> <cols>'");
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        if (!next_line(in, line, lineno))
            throw Error(path + ": expected " + std::to_string(rows) +
                        " rows, file ended after " + std::to_string(i));
        std::istringstream fields(line);
        for (Index j = 0; j < cols; ++j)
            if (!(fields >> m(i, j)))
                throw parse_error(path, lineno,
                                  "row has fewer than " + std::to_string(cols) +
                                      " values");
        std::string rest;
        if (fields >> rest)
            throw parse_error(path, lineno, "trailing field '" + rest + "'");
    }
    return m;
}

void write_labels(const std::string& path, const std::vector<Index>& labels) {
    std::ostringstream os;
    for (Index l : labels) os << l << '\n';
    atomic_write_text(path, os.str());
}

std::vector<Index> read_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::vector<Index> labels;
    std::string line;
    std::size_t lineno = 0;
    while (next_line(in, line, lineno)) {
        std::istringstream fields(line);
        Index l;
        if (!(fields >> l)) throw parse_error(path, lineno, "expected an integer label");
        labels.push_back(l);
    }
    return labels;
}

}  // namespace hrmc
