#include "nsmbs/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace nsmbs {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    if (r.ec != std::errc()) throw Error("format_double: conversion failed");
    return std::string(buf, r.ptr);
}

double parse_double(const std::string& s) {
    const std::string t = trim(s);
    double x = 0.0;
    const char* first = t.data();
    if (!t.empty() && t[0] == '+') ++first;
    const auto r = std::from_chars(first, t.data() + t.size(), x);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
        throw ParseError("not a number: '" + s + "'");
    return x;
}

int parse_int(const std::string& s) {
    const std::string t = trim(s);
    int x = 0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), x);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
        throw ParseError("not an integer: '" + s + "'");
    return x;
}

bool parse_bool(const std::string& s) {
    const std::string t = trim(s);
    if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
    if (t == "0" || t == "false" || t == "no" || t == "off") return false;
    throw ParseError("not a boolean: '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    for (const std::string& x : split_list(s)) out.push_back(parse_double(x));
    return out;
}

void write_csv(std::ostream& os, const Trajectory& tr) {
    for (std::size_t j = 0; j < tr.names.size(); ++j) os << (j ? "," : "") << tr.names[j];
    os << '\n';
    for (const auto& row : tr.rows) {
        if (row.size() != tr.names.size()) throw IoError("write_csv: row width differs from the header");
        for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << format_double(row[j]);
        os << '\n';
    }
}

void write_csv(const std::string& path, const Trajectory& tr) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    write_csv(f, tr);
    if (!f) throw IoError("write to '" + path + "' failed");
}

Trajectory read_csv(std::istream& is) {
    Trajectory tr;
    std::string line;
    if (!std::getline(is, line)) throw ParseError("read_csv: empty input");
    tr.names = split_list(line);
    if (tr.names.empty()) throw ParseError("read_csv: empty header");
    long lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(parse_double(cell));
        if (row.size() != tr.names.size())
            throw ParseError("read_csv: line " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                             " fields, header has " + std::to_string(tr.names.size()));
        tr.rows.push_back(std::move(row));
    }
    return tr;
}

Trajectory read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "'");
    return read_csv(f);
}

std::map<std::string, std::string> parse_config(std::istream& is) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    std::map<std::string, std::string> out;
    auto put = [&out](const std::string& k, const std::string& v) {
        if (!out.emplace(k, trim(v)).second) throw ParseError("config: key '" + k + "' given twice");
    };
    for (const auto& [key, node] : tree) {
        if (node.empty()) {
            // an empty section reads like a key without value
            if (!node.data().empty()) put(key, node.data());
            continue;
        }
        for (const auto& [k, leaf] : node) {
            if (!leaf.empty()) throw ParseError("config: nested section under '" + key + "'");
            put(k, leaf.data());
        }
    }
    return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config '" + path + "'");
    return parse_config(f);
}

}  // namespace nsmbs
