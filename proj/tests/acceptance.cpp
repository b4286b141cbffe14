// Acceptance suite: one pass/fail line per criterion. Placeholder until the
// scenarios are frozen.
#include <iostream>

int main()
{
    std::cout << "acceptance suite placeholder\n";
    return 1;
}
