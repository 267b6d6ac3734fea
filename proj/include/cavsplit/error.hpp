#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cavsplit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

class Infeasible : public Error {
public:
    using Error::Error;
};

/// Input file or config problem. `line` is 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::string source = {}, std::size_t line = 0)
        : Error(format(what, source, line)), source_(std::move(source)), line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    static std::string format(const std::string& what, const std::string& source, std::size_t line) {
        std::string out;
        if (!source.empty()) {
            out += source;
            if (line > 0) out += ":" + std::to_string(line);
            out += ": ";
        } else if (line > 0) {
            out += "line " + std::to_string(line) + ": ";
        }
        return out + what;
    }

    std::string source_;
    std::size_t line_;
};

} // namespace cavsplit
