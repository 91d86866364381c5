"""BIP glue operators, SOS rule formats with negative premises, and compilation between them."""
