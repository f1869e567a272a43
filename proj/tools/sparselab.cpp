// Placeholder CLI entry point; filled in as the modules land.
int main() { return 0; }
