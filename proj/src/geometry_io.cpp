#include "gradkit/geometry_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace gradkit::geometry_io {

namespace {

std::string strip(const std::string& line) {
    std::string s = line;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s.erase(hash);
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_kv(const std::string& tok, const std::string& key, int line) {
    const std::string prefix = key + "=";
    if (tok.rfind(prefix, 0) != 0)
        throw ParseError(line, "expected '" + key + "=<value>', got '" + tok + "'");
    try {
        std::size_t used = 0;
        const double v = std::stod(tok.substr(prefix.size()), &used);
        if (used != tok.size() - prefix.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, "bad numeric value in '" + tok + "'");
    }
}

}  // namespace

std::vector<magnetostatics::CurrentPath> parse(std::istream& in) {
    std::vector<magnetostatics::CurrentPath> paths;
    magnetostatics::CurrentPath current;
    bool in_path = false;
    int path_start_line = 0;
    std::string raw;
    int line = 0;

    while (std::getline(in, raw)) {
        ++line;
        const std::string s = strip(raw);
        if (s.empty()) continue;
        std::istringstream ls(s);
        std::string word;
        ls >> word;

        if (word == "path") {
            if (in_path) throw ParseError(line, "nested 'path' before 'end'");
            std::string name, cur_tok, width_tok;
            ls >> name >> cur_tok >> width_tok;
            if (name.empty() || cur_tok.empty() || width_tok.empty())
                throw ParseError(line, "expected 'path <name> current=<mA> width=<um>'");
            current = magnetostatics::CurrentPath{};
            current.name = name;
            current.current_ma = parse_kv(cur_tok, "current", line);
            current.trace_width_um = parse_kv(width_tok, "width", line);
            if (current.trace_width_um <= 0.0) throw ParseError(line, "width must be positive");
            in_path = true;
            path_start_line = line;
        } else if (word == "pt") {
            if (!in_path) throw ParseError(line, "'pt' outside of a path block");
            Vec3 p;
            if (!(ls >> p.x >> p.y >> p.z)) throw ParseError(line, "expected 'pt <x> <y> <z>'");
            std::string extra;
            if (ls >> extra) throw ParseError(line, "trailing tokens after point");
            if (!all_finite(p)) throw ParseError(line, "non-finite coordinate");
            if (!current.vertices.empty() && norm(p - current.vertices.back()) == 0.0)
                throw ParseError(line, "zero-length segment (repeated point)");
            current.vertices.push_back(p);
        } else if (word == "end") {
            if (!in_path) throw ParseError(line, "'end' without matching 'path'");
            if (current.vertices.size() < 2)
                throw ParseError(line, "path '" + current.name + "' (started line " +
                                           std::to_string(path_start_line) +
                                           ") has fewer than 2 points");
            paths.push_back(std::move(current));
            in_path = false;
        } else {
            throw ParseError(line, "unknown directive '" + word + "'");
        }
    }
    if (in_path)
        throw ParseError(line, "unterminated path block started at line " +
                                   std::to_string(path_start_line));
    return paths;
}

std::vector<magnetostatics::CurrentPath> load_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw std::runtime_error("cannot open geometry file '" + filename + "'");
    return parse(in);
}

void write(std::ostream& out, std::span<const magnetostatics::CurrentPath> paths) {
    out << "# geometry file: units um and mA\n";
    out << std::setprecision(12);
    for (const auto& p : paths) {
        out << "path " << p.name << " current=" << p.current_ma << " width=" << p.trace_width_um
            << "\n";
        for (const Vec3& v : p.vertices) out << "  pt " << v.x << " " << v.y << " " << v.z << "\n";
        out << "end\n";
    }
}

void write_file(const std::string& filename, std::span<const magnetostatics::CurrentPath> paths) {
    std::ofstream out(filename);
    if (!out) throw std::runtime_error("cannot write geometry file '" + filename + "'");
    write(out, paths);
}

}  // namespace gradkit::geometry_io
