from graphsampling.cli import main

raise SystemExit(main())
