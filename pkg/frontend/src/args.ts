/** Flag parsing for the figure scripts: --name value pairs only. */

export function parseFlags(
  argv: string[],
  required: string[],
  optional: string[] = [],
): Map<string, string> {
  const known = new Set([...required, ...optional]);
  const out = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    if (!flag.startsWith("--")) throw new Error(`expected a --flag, got "${flag}"`);
    const name = flag.slice(2);
    if (!known.has(name)) throw new Error(`unknown flag --${name}`);
    if (i + 1 >= argv.length) throw new Error(`--${name} needs a value`);
    out.set(name, argv[i + 1]);
  }
  for (const name of required) {
    if (!out.has(name)) throw new Error(`missing required flag --${name}`);
  }
  return out;
}

export function runMain(main: () => void): void {
  try {
    main();
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    process.exit(1);
  }
}
