from robin_born.cli import main

raise SystemExit(main())
