#pragma once

#include "nsmbs/scenarios.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace nsmbs {

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

// 17 significant digits, '.' separator regardless of locale
std::string format_double(double x);
double parse_double(const std::string& s);
int parse_int(const std::string& s);
bool parse_bool(const std::string& s);
std::vector<double> parse_double_list(const std::string& s);
std::vector<std::string> split_list(const std::string& s, char sep = ',');

void write_csv(std::ostream& os, const Trajectory& tr);
void write_csv(const std::string& path, const Trajectory& tr);
Trajectory read_csv(std::istream& is);
Trajectory read_csv(const std::string& path);

// [section] headers with key = value lines, '#' or ';' comments; keys are flattened
// and must be unique across sections
std::map<std::string, std::string> parse_config(std::istream& is);
std::map<std::string, std::string> read_config_file(const std::string& path);

}  // namespace nsmbs
