#include "dsl/lexer.hpp"

namespace stratos::dsl {

namespace {

bool ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

bool digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::vector<Token> lex(const std::string& text, Diagnostics& diags,
                       std::vector<std::string>& lines) {
    lines.clear();
    lines.emplace_back();
    for (char c : text) {
        if (c == '\n') {
            if (!lines.back().empty() && lines.back().back() == '\r') lines.back().pop_back();
            lines.emplace_back();
        } else {
            lines.back() += c;
        }
    }

    std::vector<Token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto bad = [&](const std::string& what) {
        Diagnostic d = error_diag("SYNTAX", {}, what);
        d.line = line;
        d.column = col;
        if (line - 1 < static_cast<int>(lines.size())) d.excerpt = lines[line - 1];
        diags.push_back(d);
    };
    auto advance = [&](char c) {
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    };
    auto push = [&](Tok k, std::string t, int l, int c) {
        out.push_back(Token{k, std::move(t), l, c});
    };

    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(c);
            ++i;
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') {
                advance(text[i]);
                ++i;
            }
            continue;
        }
        int tl = line;
        int tc = col;
        if (ident_start(c)) {
            std::string t;
            while (i < text.size() && ident_char(text[i])) {
                t += text[i];
                advance(text[i]);
                ++i;
            }
            push(Tok::Ident, std::move(t), tl, tc);
            continue;
        }
        if (digit(c) || (c == '-' && i + 1 < text.size() && digit(text[i + 1]))) {
            std::string t;
            if (c == '-') {
                t += c;
                advance(c);
                ++i;
            }
            while (i < text.size() && digit(text[i])) {
                t += text[i];
                advance(text[i]);
                ++i;
            }
            push(Tok::Int, std::move(t), tl, tc);
            continue;
        }
        if (c == '"') {
            advance(c);
            ++i;
            std::string t;
            bool closed = false;
            while (i < text.size()) {
                char d = text[i];
                if (d == '"') {
                    advance(d);
                    ++i;
                    closed = true;
                    break;
                }
                if (d == '\n') break;
                if (d == '\\' && i + 1 < text.size()) {
                    char e = text[i + 1];
                    if (e == '"' || e == '\\') {
                        t += e;
                    } else if (e == 'n') {
                        t += '\n';
                    } else if (e == 't') {
                        t += '\t';
                    } else {
                        t += e;
                    }
                    advance(d);
                    advance(e);
                    i += 2;
                    continue;
                }
                t += d;
                advance(d);
                ++i;
            }
            if (!closed) bad("unterminated string literal");
            push(Tok::String, std::move(t), tl, tc);
            continue;
        }
        if (c == '=' && i + 1 < text.size() && text[i + 1] == '=') {
            push(Tok::EqEq, "==", tl, tc);
            advance(c);
            advance(c);
            i += 2;
            continue;
        }
        if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
            push(Tok::Arrow, "->", tl, tc);
            advance(c);
            advance('>');
            i += 2;
            continue;
        }
        Tok k;
        switch (c) {
            case '{': k = Tok::LBrace; break;
            case '}': k = Tok::RBrace; break;
            case '[': k = Tok::LBracket; break;
            case ']': k = Tok::RBracket; break;
            case '(': k = Tok::LParen; break;
            case ')': k = Tok::RParen; break;
            case '=': k = Tok::Equals; break;
            case ',': k = Tok::Comma; break;
            case ':': k = Tok::Colon; break;
            case '.': k = Tok::Dot; break;
            case '/': k = Tok::Slash; break;
            default:
                bad("unexpected character");
                advance(c);
                ++i;
                continue;
        }
        push(k, std::string(1, c), tl, tc);
        advance(c);
        ++i;
    }
    out.push_back(Token{Tok::End, "", line, col});
    return out;
}

}  // namespace stratos::dsl
