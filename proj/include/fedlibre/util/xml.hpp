#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace fedlibre::xml {

inline constexpr std::string_view kXmlNamespace = "http://www.w3.org/XML/1998/namespace";

struct Attribute {
    std::string ns;
    std::string name;
    std::string value;
};

struct NamespaceDecl {
    std::string prefix; // empty for the default namespace
    std::string uri;
};

/// Namespace-resolved element tree. Character data directly inside an
/// element is concatenated into `text`; the byte span of the element in the
/// source document is kept so subtrees can be cut out verbatim.
struct Element {
    std::string ns;
    std::string name;
    std::vector<Attribute> attributes;
    std::vector<NamespaceDecl> declarations;
    std::vector<Element> children;
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;

    bool is(std::string_view ns_uri, std::string_view local) const { return ns == ns_uri && name == local; }
    const Element* child(std::string_view ns_uri, std::string_view local) const;
    std::vector<const Element*> children_named(std::string_view ns_uri, std::string_view local) const;
    const Element* first_element_child() const;
    /// Attribute value, or nullptr. Unprefixed attributes have an empty namespace.
    const std::string* attribute(std::string_view ns_uri, std::string_view local) const;
    std::string trimmed_text() const;
};

/// Parses a complete document. Throws Error(MalformedXml) on any
/// well-formedness or encoding error.
Element parse(std::string_view document);

/// Cuts `element` out of `document` byte-for-byte. Namespace declarations
/// made on ancestors (`inherited`) are re-declared on the start tag unless
/// the element already declares the same prefix, so the result parses
/// standalone.
std::string extract(std::string_view document, const Element& element, const std::vector<NamespaceDecl>& inherited);

/// Strips a leading BOM and XML declaration.
std::string_view strip_prolog(std::string_view document);

std::string escape_text(std::string_view s);
std::string escape_attribute(std::string_view s);

} // namespace fedlibre::xml
