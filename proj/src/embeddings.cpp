// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tailrank Authors

#include "tailrank/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>

#include "tailrank/errors.hpp"

namespace tailrank {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

bool parse_real(std::string_view field, double& value) {
    const char* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    return ec == std::errc() && ptr == end && std::isfinite(value);
}

bool parse_count(std::string_view field, std::size_t& value) {
    const char* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    return ec == std::errc() && ptr == end;
}

}  // namespace

void EmbeddingTable::insert(std::string term, std::vector<double> vector) {
    if (dimension_ == 0) dimension_ = vector.size();
    if (vector.size() != dimension_ || dimension_ == 0)
        throw UsageError("embedding for '" + term + "' has dimension " +
                         std::to_string(vector.size()) + ", expected " +
                         std::to_string(dimension_));
    vectors_.insert_or_assign(std::move(term), std::move(vector));
}

std::span<const double> EmbeddingTable::lookup(std::string_view term) const {
    auto it = vectors_.find(term);
    if (it == vectors_.end()) return {};
    return it->second;
}

EmbeddingTable EmbeddingTable::parse(std::istream& in, const std::string& source) {
    EmbeddingTable table;
    std::string line;
    std::size_t number = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++number;
        const auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (first) {
            first = false;
            std::size_t count = 0;
            std::size_t dim = 0;
            if (fields.size() == 2 && parse_count(fields[0], count) &&
                parse_count(fields[1], dim)) {
                if (dim == 0) throw ParseError(source, number, "header dimension is 0");
                table.dimension_ = dim;
                continue;
            }
        }
        if (fields.size() < 2) throw ParseError(source, number, "expected a term and its vector");
        if (table.dimension_ == 0) table.dimension_ = fields.size() - 1;
        if (fields.size() - 1 != table.dimension_)
            throw ParseError(source, number,
                             "vector has " + std::to_string(fields.size() - 1) +
                                 " components, expected " + std::to_string(table.dimension_));
        std::vector<double> vec(table.dimension_);
        for (std::size_t i = 0; i < vec.size(); ++i)
            if (!parse_real(fields[i + 1], vec[i]))
                throw ParseError(source, number,
                                 "invalid real '" + std::string(fields[i + 1]) + "'");
        std::string term(fields[0]);
        if (table.vectors_.contains(term))
            table.warnings_.push_back(source + ":" + std::to_string(number) + ": duplicate term '" +
                                      term + "', last occurrence wins");
        table.vectors_.insert_or_assign(std::move(term), std::move(vec));
    }
    return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path.string() + "'");
    return EmbeddingTable::parse(in, path.string());
}

ContextVector context_vector(const TokenSequence& tokens, const EmbeddingTable& table) {
    ContextVector out;
    out.values.assign(table.dimension(), 0.0);
    // Summing per distinct term in sorted order makes the result independent
    // of token order, bit for bit.
    std::map<std::string_view, std::size_t> counts;
    for (const auto& t : tokens) ++counts[t];
    for (const auto& [term, count] : counts) {
        auto vec = table.lookup(term);
        if (vec.empty()) continue;
        const double weight = static_cast<double>(count);
        for (std::size_t i = 0; i < vec.size(); ++i) out.values[i] += weight * vec[i];
        out.covered_terms += count;
    }
    if (out.covered_terms > 0) {
        const double n = static_cast<double>(out.covered_terms);
        for (double& x : out.values) x /= n;
    }
    return out;
}

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw UsageError("cosine of vectors with dimensions " + std::to_string(u.size()) + " and " +
                         std::to_string(v.size()));
    double dot = 0.0;
    double uu = 0.0;
    double vv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    if (uu == 0.0 || vv == 0.0) return 0.0;
    // sqrt(fl(x * x)) == x, so identical vectors give exactly 1.
    return std::clamp(dot / std::sqrt(uu * vv), -1.0, 1.0);
}

}  // namespace tailrank
