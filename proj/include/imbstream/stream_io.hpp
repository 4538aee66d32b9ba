#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "imbstream/stream_model.hpp"

namespace imbs {

enum class StreamFormat : std::uint8_t { Csv, Arff };

StreamFormat parse_stream_format(const std::string& s);  // "csv" | "arff"
// Guess from the file extension; CSV unless it ends in ".arff".
StreamFormat format_from_path(const std::string& path);

// Parse failure with a "source:line:column: message" description.
class StreamFormatError : public std::runtime_error {
public:
    StreamFormatError(const std::string& source, std::size_t line, std::size_t column, const std::string& message);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// Attributes are written in shortest round-trip form, so reading a file
// back and writing it again reproduces it byte for byte.
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const LabeledExample& ex);
void write_csv(std::ostream& os, std::span<const LabeledExample> stream);

void write_arff_header(std::ostream& os, const std::string& relation, std::size_t num_classes);
void write_arff_row(std::ostream& os, const LabeledExample& ex);
void write_arff(std::ostream& os, std::span<const LabeledExample> stream, const std::string& relation,
                std::size_t num_classes);

// Readers assign t = 1, 2, ... in file order.
std::vector<LabeledExample> read_csv(std::istream& is, const std::string& source = "<stream>");
std::vector<LabeledExample> read_arff(std::istream& is, const std::string& source = "<stream>");
std::vector<LabeledExample> read_stream_file(const std::string& path);

std::size_t infer_num_classes(std::span<const LabeledExample> stream);

}  // namespace imbs
