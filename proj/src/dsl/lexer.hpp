#ifndef STRATOS_DSL_LEXER_HPP
#define STRATOS_DSL_LEXER_HPP

#include <string>
#include <vector>

#include "core/diagnostics.hpp"

namespace stratos::dsl {

enum class Tok {
    Ident,
    Int,
    String,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Equals,
    EqEq,
    Comma,
    Colon,
    Arrow,
    Dot,
    Slash,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;  // identifier text, decoded string, or digits
    int line = 1;
    int column = 1;
};

// Tokenizes the whole input. Never throws; bad bytes and unterminated
// strings become diagnostics and the lexer moves on. The trailing token is
// always Tok::End.
std::vector<Token> lex(const std::string& text, Diagnostics& diags,
                       std::vector<std::string>& lines);

}  // namespace stratos::dsl

#endif
