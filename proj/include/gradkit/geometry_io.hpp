#ifndef GRADKIT_GEOMETRY_IO_HPP
#define GRADKIT_GEOMETRY_IO_HPP

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gradkit/magnetostatics.hpp"

namespace gradkit::geometry_io {

// Line-oriented geometry file, units um and mA, '#' starts a comment:
//
//   path <name> current=<mA> width=<um>
//     pt <x> <y> <z>
//     ...
//   end
//
// Parse errors carry the 1-based line number.

class ParseError : public std::runtime_error {
  public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

std::vector<magnetostatics::CurrentPath> parse(std::istream& in);
std::vector<magnetostatics::CurrentPath> load_file(const std::string& filename);

void write(std::ostream& out, std::span<const magnetostatics::CurrentPath> paths);
void write_file(const std::string& filename, std::span<const magnetostatics::CurrentPath> paths);

}  // namespace gradkit::geometry_io

#endif
