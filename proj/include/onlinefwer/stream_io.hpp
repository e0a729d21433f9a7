#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "onlinefwer/errors.hpp"

namespace ofwer {

// One input hypothesis.
struct StreamRecord {
    double p = 0.0;
    std::optional<std::string> batch_id;
    std::optional<bool> non_null;  // ground-truth label, when given
    std::size_t line = 0;          // 1-based source line
};

// Malformed input, carrying the offending line.
class InputError : public InvalidInput {
public:
    InputError(std::size_t line, const std::string& what)
        : InvalidInput("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

enum class StreamFormat { csv, jsonl };

// ".jsonl" and ".ndjson" are JSON lines; everything else is CSV.
StreamFormat format_for_path(const std::string& path);

// Pull parser over CSV (header naming p and optionally batch_id, label) or
// JSON lines with the same keys. Blank lines are skipped; fields may be padded
// with whitespace. Labels accept 0/1, true/false, null/non-null.
class StreamReader {
public:
    StreamReader(std::istream& in, StreamFormat format);

    // Next record, or nullopt at end of input. Throws InputError.
    std::optional<StreamRecord> next();
    bool has_batch_ids() const { return batch_col_.has_value() || saw_batch_; }

private:
    bool read_header();
    StreamRecord parse_csv(const std::string& line);
    StreamRecord parse_jsonl(const std::string& line);

    std::istream& in_;
    StreamFormat format_;
    std::size_t line_ = 0;
    bool header_done_ = false;
    std::size_t n_cols_ = 0;
    std::size_t p_col_ = 0;
    std::optional<std::size_t> batch_col_;
    std::optional<std::size_t> label_col_;
    bool saw_batch_ = false;
};

// Reads a whole stream into memory.
std::vector<StreamRecord> read_stream(std::istream& in, StreamFormat format);

}  // namespace ofwer
