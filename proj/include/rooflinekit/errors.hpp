#pragma once

#include <stdexcept>
#include <string>

namespace rooflinekit {

// Error categories map 1:1 onto CLI exit codes (io=1, validation=2, pipeline=3).
enum class ErrorKind { io, validation, pipeline };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(ErrorKind::io, msg) {}
};

// Malformed content in an input file; carries a 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, long line = 0)
        : Error(ErrorKind::validation, line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& msg) : Error(ErrorKind::validation, msg) {}
};

class IncompleteProfileError : public Error {
public:
    explicit IncompleteProfileError(const std::string& msg) : Error(ErrorKind::validation, msg) {}
};

class TemplateError : public Error {
public:
    explicit TemplateError(const std::string& msg) : Error(ErrorKind::validation, msg) {}
};

class BankError : public Error {
public:
    explicit BankError(const std::string& msg) : Error(ErrorKind::validation, msg) {}
};

class ExportError : public Error {
public:
    explicit ExportError(const std::string& msg) : Error(ErrorKind::validation, msg) {}
};

class LoadError : public Error {
public:
    explicit LoadError(const std::string& msg) : Error(ErrorKind::validation, msg) {}
};

// A pipeline-level constraint cannot be met (e.g. an empty language/class bucket).
class PipelineError : public Error {
public:
    explicit PipelineError(const std::string& msg) : Error(ErrorKind::pipeline, msg) {}
};

class BalanceError : public PipelineError {
public:
    explicit BalanceError(const std::string& msg) : PipelineError(msg) {}
};

} // namespace rooflinekit
